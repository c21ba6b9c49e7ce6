#include "dcroute/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dcroute {

namespace {

constexpr double kVerifyTolerance = 1e-7;

}  // namespace

int LpModel::add_variable(std::string name, double cost, double lb, double ub) {
  variables_.push_back({std::move(name), cost, lb, ub});
  return variable_count() - 1;
}

int LpModel::add_row(std::string name, RowSense sense, double rhs,
                     std::vector<SparseEntry> entries) {
  rows_.push_back({std::move(name), sense, rhs, std::move(entries)});
  return row_count() - 1;
}

void LpModel::add_coefficient(int row, int variable, double value) {
  rows_.at(static_cast<std::size_t>(row)).entries.push_back({variable, value});
}

int LpModel::find_variable(const std::string& name) const {
  for (int j = 0; j < variable_count(); ++j) {
    if (variables_[static_cast<std::size_t>(j)].name == name) return j;
  }
  return -1;
}

void LpModel::validate() const {
  for (const LpVariable& v : variables_) {
    if (std::isnan(v.cost) || std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub) {
      throw std::invalid_argument("variable " + v.name + " has invalid cost or bounds");
    }
  }
  for (const LpRow& r : rows_) {
    if (!std::isfinite(r.rhs)) throw std::invalid_argument("row " + r.name + " has a non-finite rhs");
    for (const SparseEntry& e : r.entries) {
      if (e.index < 0 || e.index >= variable_count()) {
        throw std::invalid_argument("row " + r.name + " references an undeclared variable");
      }
      if (!std::isfinite(e.value)) {
        throw std::invalid_argument("row " + r.name + " has a non-finite coefficient");
      }
    }
  }
}

double max_violation(const LpModel& model, std::span<const double> values) {
  double worst = 0.0;
  for (int j = 0; j < model.variable_count(); ++j) {
    const LpVariable& v = model.variables()[static_cast<std::size_t>(j)];
    const double x = values[static_cast<std::size_t>(j)];
    worst = std::max({worst, v.lb - x, x - v.ub});
  }
  for (const LpRow& r : model.rows()) {
    double a = 0.0;
    for (const SparseEntry& e : r.entries) a += e.value * values[static_cast<std::size_t>(e.index)];
    if (r.sense != RowSense::kGreaterEqual) worst = std::max(worst, a - r.rhs);
    if (r.sense != RowSense::kLessEqual) worst = std::max(worst, r.rhs - a);
  }
  return worst;
}

LpSolution solve_lp(const LpModel& model, const SimplexOptions& options) {
  model.validate();
  SimplexEngine engine(options);
  const double sign = model.sense() == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  for (const LpRow& r : model.rows()) engine.add_row(r.sense, r.rhs);

  std::vector<std::vector<SparseEntry>> columns(static_cast<std::size_t>(model.variable_count()));
  for (int i = 0; i < model.row_count(); ++i) {
    for (const SparseEntry& e : model.rows()[static_cast<std::size_t>(i)].entries) {
      auto& col = columns[static_cast<std::size_t>(e.index)];
      // Repeated coefficients for one (row, variable) pair add up.
      if (!col.empty() && col.back().index == i) {
        col.back().value += e.value;
      } else {
        col.push_back({i, e.value});
      }
    }
  }
  for (int j = 0; j < model.variable_count(); ++j) {
    const LpVariable& v = model.variables()[static_cast<std::size_t>(j)];
    engine.add_column(sign * v.cost, v.lb, v.ub, columns[static_cast<std::size_t>(j)]);
  }

  LpSolution out;
  out.status = engine.solve();
  out.iterations = engine.iterations();
  if (out.status != LpStatus::kOptimal) return out;
  out.values.resize(static_cast<std::size_t>(model.variable_count()));
  for (int j = 0; j < model.variable_count(); ++j) out.values[static_cast<std::size_t>(j)] = engine.value(j);
  out.objective = sign * engine.objective();
  const double violation = max_violation(model, out.values);
  if (violation > kVerifyTolerance) {
    throw std::runtime_error("simplex solution violates the model by " + std::to_string(violation));
  }
  return out;
}

namespace {

void write_term(std::ostream& out, double coef, const std::string& name, bool first) {
  if (coef < 0) {
    out << (first ? "-" : " - ");
  } else if (!first) {
    out << " + ";
  }
  const double a = std::abs(coef);
  if (a != 1.0) out << a << ' ';
  out << name;
}

}  // namespace

void write_lp(std::ostream& out, const LpModel& model) {
  const auto& vars = model.variables();
  auto name_of = [&](int j) { return vars[static_cast<std::size_t>(j)].name; };
  out.precision(17);
  out << (model.sense() == ObjectiveSense::kMinimize ? "Minimize\n" : "Maximize\n") << " obj: ";
  bool first = true;
  for (int j = 0; j < model.variable_count(); ++j) {
    const double c = vars[static_cast<std::size_t>(j)].cost;
    if (c == 0.0) continue;
    write_term(out, c, name_of(j), first);
    first = false;
  }
  if (first) out << "0 " << (model.variable_count() ? name_of(0) : "x");
  out << "\nSubject To\n";
  for (const LpRow& r : model.rows()) {
    out << ' ' << r.name << ": ";
    first = true;
    for (const SparseEntry& e : r.entries) {
      write_term(out, e.value, name_of(e.index), first);
      first = false;
    }
    if (first) out << "0 " << (model.variable_count() ? name_of(0) : "x");
    out << (r.sense == RowSense::kLessEqual ? " <= " : r.sense == RowSense::kGreaterEqual ? " >= " : " = ")
        << r.rhs << '\n';
  }
  out << "Bounds\n";
  for (const LpVariable& v : vars) {
    if (v.lb == 0.0 && v.ub == kInfinity) continue;
    if (v.lb == -kInfinity && v.ub == kInfinity) {
      out << ' ' << v.name << " free\n";
    } else if (v.lb == v.ub) {
      out << ' ' << v.name << " = " << v.lb << '\n';
    } else {
      out << ' ';
      if (v.lb == -kInfinity) {
        out << "-inf";
      } else {
        out << v.lb;
      }
      out << " <= " << v.name << " <= ";
      if (v.ub == kInfinity) {
        out << "+inf";
      } else {
        out << v.ub;
      }
      out << '\n';
    }
  }
  out << "End\n";
}

}  // namespace dcroute
