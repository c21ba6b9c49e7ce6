#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dcroute {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
std::string to_string(LpStatus status);

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

struct SimplexOptions {
  std::int64_t max_iterations = 1000000;
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  // Smallest |pivot| accepted by the ratio test.
  double pivot_tolerance = 1e-9;
  // Basis reinversion period, in pivots.
  int refactor_interval = 80;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_limit = 50;
};

struct SparseEntry {
  int index;
  double value;
};

// Bounded primal simplex on a sparse column store with a product-form
// basis inverse (eta file), minimizing c.x subject to
//   row_i . x (<=, >=, =) rhs_i,  lb_j <= x_j <= ub_j.
// Every row carries a logical (slack) variable, so the all-slack basis is
// always available; infeasible starts go through a composite phase 1 that
// minimizes the sum of bound violations of the basic variables. Pricing is
// Dantzig's rule with a Harris two-pass ratio test, falling back to Bland's
// rule after a run of degenerate pivots.
//
// Rows and columns may be added and right-hand sides changed between
// solves; the next solve continues from the current basis.
class SimplexEngine {
 public:
  explicit SimplexEngine(SimplexOptions options = {});

  int add_row(RowSense sense, double rhs);
  // Entries refer to existing rows. The new column starts nonbasic at its
  // finite bound nearest to zero.
  int add_column(double cost, double lb, double ub, std::span<const SparseEntry> entries);
  void set_rhs(int row, double rhs);
  // A nonbasic column whose value equals one of the new bounds keeps it;
  // otherwise it moves to the bound nearest zero.
  void set_bounds(int column, double lb, double ub);
  void set_cost(int column, double cost);

  int row_count() const { return rows_; }
  int column_count() const { return static_cast<int>(structural_.size()); }

  LpStatus solve();

  std::int64_t iterations() const { return iterations_; }
  double objective() const;
  double value(int column) const { return x_[static_cast<std::size_t>(structural_[static_cast<std::size_t>(column)])]; }
  // Row activity row_i . x.
  double row_activity(int row) const;
  // Simplex multipliers of the phase the last solve ended in (phase 1
  // multipliers after an infeasible result).
  const std::vector<double>& duals() const { return y_; }
  // cost - y . entries for a prospective column.
  double reduced_cost(double cost, std::span<const SparseEntry> entries) const;

 private:
  enum class State : std::uint8_t { kBasic, kLower, kUpper, kFree };
  struct Eta {
    int row;
    double pivot;  // 1 / alpha_row
    std::size_t begin;
    std::size_t end;
  };

  int add_variable(double cost, double lb, double ub, std::span<const SparseEntry> entries);
  void place_nonbasic(int j);
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void push_eta(int row, const std::vector<double>& alpha);
  void refactor();
  void recompute_primal();
  double column_dot(int j, const std::vector<double>& y) const;
  bool infeasible(int j, double tol) const;

  SimplexOptions opt_;
  int rows_ = 0;
  // Column store over all variables (slacks and structurals).
  std::vector<std::size_t> col_begin_{0};
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_, lb_, ub_, x_;
  std::vector<State> state_;
  std::vector<int> structural_;  // column id -> variable
  std::vector<char> is_slack_;
  std::vector<int> slack_of_row_;
  std::vector<double> rhs_;
  std::vector<int> head_;        // row -> basic variable
  std::vector<int> position_;    // variable -> row, or -1

  std::vector<Eta> etas_;
  std::vector<int> eta_row_;
  std::vector<double> eta_val_;
  int pivots_since_refactor_ = 0;
  bool primal_stale_ = true;

  std::vector<double> y_;
  std::int64_t iterations_ = 0;
};

}  // namespace dcroute
