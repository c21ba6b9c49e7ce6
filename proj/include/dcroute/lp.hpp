#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dcroute/simplex.hpp"

namespace dcroute {

enum class ObjectiveSense { kMinimize, kMaximize };

struct LpVariable {
  std::string name;
  double cost = 0.0;
  double lb = 0.0;
  double ub = kInfinity;
};

struct LpRow {
  std::string name;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::vector<SparseEntry> entries;  // variable index, coefficient
};

// A linear program held as plain data, for building, dumping and solving.
class LpModel {
 public:
  int add_variable(std::string name, double cost = 0.0, double lb = 0.0, double ub = kInfinity);
  int add_row(std::string name, RowSense sense, double rhs, std::vector<SparseEntry> entries = {});
  void add_coefficient(int row, int variable, double value);

  void set_sense(ObjectiveSense sense) { sense_ = sense; }
  ObjectiveSense sense() const { return sense_; }
  const std::vector<LpVariable>& variables() const { return variables_; }
  const std::vector<LpRow>& rows() const { return rows_; }
  int variable_count() const { return static_cast<int>(variables_.size()); }
  int row_count() const { return static_cast<int>(rows_.size()); }
  int find_variable(const std::string& name) const;

  // Throws std::invalid_argument on undeclared variables, NaN data or
  // crossed bounds.
  void validate() const;

 private:
  ObjectiveSense sense_ = ObjectiveSense::kMinimize;
  std::vector<LpVariable> variables_;
  std::vector<LpRow> rows_;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> values;
  double objective = 0.0;
  std::int64_t iterations = 0;
};

// Largest violation of any row or bound by `values`.
double max_violation(const LpModel& model, std::span<const double> values);

// Solves the model with the embedded simplex. An optimal result is
// re-checked against the rows and bounds (tolerance 1e-7); a failed check
// throws std::runtime_error.
LpSolution solve_lp(const LpModel& model, const SimplexOptions& options = {});

// CPLEX LP text format, readable by common external solvers.
void write_lp(std::ostream& out, const LpModel& model);

}  // namespace dcroute
