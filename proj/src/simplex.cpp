#include "dcroute/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dcroute {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

constexpr double kDropTolerance = 1e-13;
constexpr double kDegenerateStep = 1e-12;

}  // namespace

SimplexEngine::SimplexEngine(SimplexOptions options) : opt_(options) {}

int SimplexEngine::add_variable(double cost, double lb, double ub,
                                std::span<const SparseEntry> entries) {
  if (lb > ub) throw std::invalid_argument("simplex: lower bound above upper bound");
  const int j = static_cast<int>(cost_.size());
  for (const SparseEntry& e : entries) {
    if (e.index < 0 || e.index >= rows_) throw std::invalid_argument("simplex: entry row out of range");
    if (e.value == 0.0) continue;
    col_row_.push_back(e.index);
    col_val_.push_back(e.value);
  }
  col_begin_.push_back(col_row_.size());
  cost_.push_back(cost);
  lb_.push_back(lb);
  ub_.push_back(ub);
  x_.push_back(0.0);
  state_.push_back(State::kLower);
  position_.push_back(-1);
  is_slack_.push_back(0);
  return j;
}

void SimplexEngine::place_nonbasic(int j) {
  const auto k = static_cast<std::size_t>(j);
  double value = 0.0;
  if (std::isfinite(lb_[k]) && (!std::isfinite(ub_[k]) || std::abs(lb_[k]) <= std::abs(ub_[k]))) {
    state_[k] = State::kLower;
    value = lb_[k];
  } else if (std::isfinite(ub_[k])) {
    state_[k] = State::kUpper;
    value = ub_[k];
  } else {
    state_[k] = State::kFree;
  }
  if (value != x_[k]) primal_stale_ = true;
  x_[k] = value;
  position_[k] = -1;
}

int SimplexEngine::add_row(RowSense sense, double rhs) {
  const int row = rows_++;
  rhs_.push_back(rhs);
  y_.push_back(0.0);
  const SparseEntry unit{row, 1.0};
  double lb = 0.0, ub = 0.0;
  if (sense == RowSense::kLessEqual) ub = kInfinity;
  if (sense == RowSense::kGreaterEqual) lb = -kInfinity;
  const int slack = add_variable(0.0, lb, ub, std::span<const SparseEntry>(&unit, 1));
  // Existing columns have no entry in the new row, so the basis extends by
  // the slack alone and the eta file stays valid.
  is_slack_[static_cast<std::size_t>(slack)] = 1;
  slack_of_row_.push_back(slack);
  state_[static_cast<std::size_t>(slack)] = State::kBasic;
  position_[static_cast<std::size_t>(slack)] = row;
  head_.push_back(slack);
  x_[static_cast<std::size_t>(slack)] = rhs;
  primal_stale_ = true;
  return row;
}

int SimplexEngine::add_column(double cost, double lb, double ub,
                              std::span<const SparseEntry> entries) {
  const int j = add_variable(cost, lb, ub, entries);
  place_nonbasic(j);
  structural_.push_back(j);
  return static_cast<int>(structural_.size()) - 1;
}

void SimplexEngine::set_rhs(int row, double rhs) {
  rhs_.at(static_cast<std::size_t>(row)) = rhs;
  primal_stale_ = true;
}

void SimplexEngine::set_bounds(int column, double lb, double ub) {
  if (lb > ub) throw std::invalid_argument("simplex: lower bound above upper bound");
  const int j = structural_.at(static_cast<std::size_t>(column));
  const auto k = static_cast<std::size_t>(j);
  lb_[k] = lb;
  ub_[k] = ub;
  if (state_[k] == State::kBasic) return;
  // A nonbasic value that sits on one of the new bounds stays put.
  if (x_[k] == ub && x_[k] != lb) {
    state_[k] = State::kUpper;
  } else if (x_[k] == lb) {
    state_[k] = State::kLower;
  } else {
    place_nonbasic(j);
  }
}

void SimplexEngine::set_cost(int column, double cost) {
  cost_[static_cast<std::size_t>(structural_.at(static_cast<std::size_t>(column)))] = cost;
}

void SimplexEngine::ftran(std::vector<double>& v) const {
  for (const Eta& e : etas_) {
    const double vr = v[static_cast<std::size_t>(e.row)];
    if (vr == 0.0) continue;
    v[static_cast<std::size_t>(e.row)] = vr * e.pivot;
    for (std::size_t k = e.begin; k < e.end; ++k) {
      v[static_cast<std::size_t>(eta_row_[k])] += eta_val_[k] * vr;
    }
  }
}

void SimplexEngine::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[static_cast<std::size_t>(it->row)] * it->pivot;
    for (std::size_t k = it->begin; k < it->end; ++k) {
      s += eta_val_[k] * v[static_cast<std::size_t>(eta_row_[k])];
    }
    v[static_cast<std::size_t>(it->row)] = s;
  }
}

void SimplexEngine::push_eta(int row, const std::vector<double>& alpha) {
  const double pivot = 1.0 / alpha[static_cast<std::size_t>(row)];
  const std::size_t begin = eta_row_.size();
  for (int i = 0; i < rows_; ++i) {
    const double a = alpha[static_cast<std::size_t>(i)];
    if (i == row || std::abs(a) <= kDropTolerance) continue;
    eta_row_.push_back(i);
    eta_val_.push_back(-a * pivot);
  }
  etas_.push_back({row, pivot, begin, eta_row_.size()});
}

double SimplexEngine::column_dot(int j, const std::vector<double>& y) const {
  double s = 0.0;
  const auto k = static_cast<std::size_t>(j);
  for (std::size_t p = col_begin_[k]; p < col_begin_[k + 1]; ++p) {
    s += y[static_cast<std::size_t>(col_row_[p])] * col_val_[p];
  }
  return s;
}

void SimplexEngine::recompute_primal() {
  std::vector<double> r(rhs_);
  const int n = static_cast<int>(cost_.size());
  for (int j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (state_[k] == State::kBasic || x_[k] == 0.0) continue;
    for (std::size_t p = col_begin_[k]; p < col_begin_[k + 1]; ++p) {
      r[static_cast<std::size_t>(col_row_[p])] -= col_val_[p] * x_[k];
    }
  }
  ftran(r);
  for (int i = 0; i < rows_; ++i) {
    x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] = r[static_cast<std::size_t>(i)];
  }
  primal_stale_ = false;
}

void SimplexEngine::refactor() {
  etas_.clear();
  eta_row_.clear();
  eta_val_.clear();
  pivots_since_refactor_ = 0;

  const auto m = static_cast<std::size_t>(rows_);
  std::vector<int> occupant(m, -1);
  std::vector<int> structurals;
  for (int var : head_) {
    const auto k = static_cast<std::size_t>(var);
    if (is_slack_[k]) {
      occupant[static_cast<std::size_t>(col_row_[col_begin_[k]])] = var;
    } else {
      structurals.push_back(var);
    }
  }
  std::stable_sort(structurals.begin(), structurals.end(), [&](int a, int b) {
    const auto ka = static_cast<std::size_t>(a), kb = static_cast<std::size_t>(b);
    return col_begin_[ka + 1] - col_begin_[ka] < col_begin_[kb + 1] - col_begin_[kb];
  });

  std::vector<double> v(m);
  for (int var : structurals) {
    const auto k = static_cast<std::size_t>(var);
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t p = col_begin_[k]; p < col_begin_[k + 1]; ++p) {
      v[static_cast<std::size_t>(col_row_[p])] = col_val_[p];
    }
    ftran(v);
    int best = -1;
    double best_abs = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (occupant[i] >= 0) continue;
      if (std::abs(v[i]) > best_abs) {
        best_abs = std::abs(v[i]);
        best = static_cast<int>(i);
      }
    }
    if (best < 0 || best_abs < opt_.pivot_tolerance) {
      // Dependent column: leave it out and let a slack cover its row.
      place_nonbasic(var);
      continue;
    }
    push_eta(best, v);
    occupant[static_cast<std::size_t>(best)] = var;
  }

  // Rows left uncovered get their own slack back.
  for (std::size_t i = 0; i < m; ++i) {
    if (occupant[i] < 0) occupant[i] = slack_of_row_[i];
  }
  std::vector<char> kept(cost_.size(), 0);
  for (int var : occupant) kept[static_cast<std::size_t>(var)] = 1;
  for (int var : head_) {
    if (!kept[static_cast<std::size_t>(var)]) place_nonbasic(var);
  }
  head_ = occupant;
  for (std::size_t i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(head_[i]);
    state_[k] = State::kBasic;
    position_[k] = static_cast<int>(i);
  }
  recompute_primal();
}

bool SimplexEngine::infeasible(int j, double tol) const {
  const auto k = static_cast<std::size_t>(j);
  return x_[k] < lb_[k] - tol || x_[k] > ub_[k] + tol;
}

LpStatus SimplexEngine::solve() {
  if (primal_stale_) recompute_primal();
  const auto m = static_cast<std::size_t>(rows_);
  const double ptol = opt_.primal_tolerance;
  const double dtol = opt_.dual_tolerance;
  std::vector<double> alpha(m);
  struct Candidate {
    std::size_t row;
    double bound;
    double ratio;
  };
  std::vector<Candidate> candidates;
  int degenerate = 0;
  bool bland = false;
  int stalls = 0;

  while (true) {
    if (pivots_since_refactor_ >= opt_.refactor_interval) refactor();

    bool phase1 = false;
    for (std::size_t i = 0; i < m && !phase1; ++i) phase1 = infeasible(head_[i], ptol);
    for (std::size_t i = 0; i < m; ++i) {
      const int j = head_[i];
      const auto k = static_cast<std::size_t>(j);
      if (phase1) {
        y_[i] = x_[k] < lb_[k] - ptol ? -1.0 : (x_[k] > ub_[k] + ptol ? 1.0 : 0.0);
      } else {
        y_[i] = cost_[k];
      }
    }
    btran(y_);

    int q = -1;
    double dq = 0.0;
    double best = 0.0;
    const int n = static_cast<int>(cost_.size());
    for (int j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(j);
      const State s = state_[k];
      if (s == State::kBasic || lb_[k] == ub_[k]) continue;
      const double d = (phase1 ? 0.0 : cost_[k]) - column_dot(j, y_);
      const bool improving = (s == State::kLower && d < -dtol) || (s == State::kUpper && d > dtol) ||
                             (s == State::kFree && std::abs(d) > dtol);
      if (!improving) continue;
      if (bland) {
        q = j;
        dq = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        q = j;
        dq = d;
      }
    }
    if (q < 0) {
      if (pivots_since_refactor_ > 0) {
        // Confirm optimality/infeasibility on a fresh factorization.
        refactor();
        continue;
      }
      return phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal;
    }
    if (iterations_ >= opt_.max_iterations) return LpStatus::kIterationLimit;
    ++iterations_;

    const double sigma = dq < 0.0 ? 1.0 : -1.0;
    const auto kq = static_cast<std::size_t>(q);
    std::fill(alpha.begin(), alpha.end(), 0.0);
    for (std::size_t p = col_begin_[kq]; p < col_begin_[kq + 1]; ++p) {
      alpha[static_cast<std::size_t>(col_row_[p])] = col_val_[p];
    }
    ftran(alpha);

    // Ratio test. rate is d x_B[i] / d theta.
    candidates.clear();
    double limit = kInfinity;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = alpha[i];
      if (std::abs(a) <= opt_.pivot_tolerance) continue;
      const double rate = -sigma * a;
      const auto k = static_cast<std::size_t>(head_[i]);
      const double xi = x_[k];
      double bound;
      if (rate < 0.0) {
        if (xi > ub_[k] + ptol) {
          bound = ub_[k];
        } else if (xi < lb_[k] - ptol || !std::isfinite(lb_[k])) {
          continue;
        } else {
          bound = lb_[k];
        }
      } else {
        if (xi < lb_[k] - ptol) {
          bound = lb_[k];
        } else if (xi > ub_[k] + ptol || !std::isfinite(ub_[k])) {
          continue;
        } else {
          bound = ub_[k];
        }
      }
      const double dist = rate < 0.0 ? xi - bound : bound - xi;
      const double ratio = std::max(0.0, dist / std::abs(rate));
      candidates.push_back({i, bound, ratio});
      limit = std::min(limit, (dist + ptol) / std::abs(rate));
    }

    int leave = -1;
    double theta = kInfinity;
    double leave_bound = 0.0;
    if (bland) {
      for (const Candidate& c : candidates) {
        const bool better = c.ratio < theta - kDegenerateStep ||
                            (c.ratio <= theta + kDegenerateStep && leave >= 0 &&
                             head_[c.row] < head_[static_cast<std::size_t>(leave)]);
        if (leave < 0 || better) {
          leave = static_cast<int>(c.row);
          theta = c.ratio;
          leave_bound = c.bound;
        }
      }
    } else {
      double best_pivot = 0.0;
      for (const Candidate& c : candidates) {
        if (c.ratio > limit) continue;
        const double piv = std::abs(alpha[c.row]);
        if (piv > best_pivot) {
          best_pivot = piv;
          leave = static_cast<int>(c.row);
          theta = c.ratio;
          leave_bound = c.bound;
        }
      }
    }

    const double span = ub_[kq] - lb_[kq];
    if (leave < 0 && !std::isfinite(span)) {
      if (phase1 && stalls++ < 3) {
        refactor();
        continue;
      }
      return LpStatus::kUnbounded;
    }
    const bool flip = std::isfinite(span) && (leave < 0 || span <= theta);
    if (flip) theta = span;

    if (theta <= kDegenerateStep) {
      if (++degenerate > opt_.degenerate_limit) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }

    if (theta > 0.0) {
      x_[kq] += sigma * theta;
      for (std::size_t i = 0; i < m; ++i) {
        if (alpha[i] != 0.0) x_[static_cast<std::size_t>(head_[i])] -= sigma * alpha[i] * theta;
      }
    }
    if (flip) {
      state_[kq] = sigma > 0.0 ? State::kUpper : State::kLower;
      x_[kq] = sigma > 0.0 ? ub_[kq] : lb_[kq];
      continue;
    }
    const auto lr = static_cast<std::size_t>(leave);
    const auto kl = static_cast<std::size_t>(head_[lr]);
    x_[kl] = leave_bound;
    state_[kl] = leave_bound == lb_[kl] ? State::kLower : State::kUpper;
    position_[kl] = -1;
    head_[lr] = q;
    position_[kq] = leave;
    state_[kq] = State::kBasic;
    push_eta(leave, alpha);
    ++pivots_since_refactor_;
  }
}

double SimplexEngine::objective() const {
  double s = 0.0;
  for (int j : structural_) s += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
  return s;
}

double SimplexEngine::row_activity(int row) const {
  const auto i = static_cast<std::size_t>(row);
  return rhs_[i] - x_[static_cast<std::size_t>(slack_of_row_[i])];
}

double SimplexEngine::reduced_cost(double cost, std::span<const SparseEntry> entries) const {
  double s = cost;
  for (const SparseEntry& e : entries) s -= y_[static_cast<std::size_t>(e.index)] * e.value;
  return s;
}

}  // namespace dcroute
