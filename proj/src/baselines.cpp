#include "dcroute/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <queue>
#include <tuple>

namespace dcroute {

namespace {

// Objective values closer than this count as ties.
constexpr double kAdmitSlack = 1e-9;
// Column values below this are solver noise and dropped on extraction.
constexpr double kDropValue = 1e-12;
constexpr double kPricingTolerance = 1e-9;

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

struct Intervals {
  Slot now = 0;
  std::vector<Slot> ends;  // ascending distinct deadlines

  int count() const { return static_cast<int>(ends.size()); }
  Slot begin(int k) const { return k == 0 ? now : ends[sz(k - 1)]; }
  double length(int k) const { return static_cast<double>(ends[sz(k)] - begin(k)); }
  // Index of the interval that ends at `deadline`.
  int last_for(Slot deadline) const {
    return static_cast<int>(std::lower_bound(ends.begin(), ends.end(), deadline) - ends.begin());
  }
};

struct Demand {
  RequestId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double volume = 0.0;
  Slot deadline = 0;
  int last = 0;             // last eligible interval
  std::vector<Path> paths;  // column path pool
  std::vector<std::vector<char>> has;  // has[path][interval]
  int row = -1;
};

struct Column {
  int demand;
  int path;
  int interval;
};

// Interval-aggregated path LP: one capacity row per (channel, interval),
// one demand row per request, one column per (request, path, interval) and,
// for the minimax objective, the utilization column z.
class IntervalLp {
 public:
  IntervalLp(const Topology& topo, Intervals iv, LpObjective objective,
             const SimplexOptions& options, const std::vector<char>& channel_used)
      : iv_(std::move(iv)), objective_(objective), engine_(options) {
    const int channels = topo.channel_count();
    cap_row_.assign(sz(channels * iv_.count()), -1);
    std::vector<SparseEntry> z_entries;
    for (ChannelId c = 0; c < channels; ++c) {
      if (!channel_used[sz(c)]) continue;
      for (int k = 0; k < iv_.count(); ++k) {
        const int row = engine_.add_row(RowSense::kLessEqual, 0.0);
        cap_row_[sz(c * iv_.count() + k)] = row;
        z_entries.push_back({row, -iv_.length(k) * topo.channel_capacity(c)});
      }
    }
    z_col_ = engine_.add_column(1.0, 1.0, 1.0, z_entries);
  }

  const Intervals& intervals() const { return iv_; }
  SimplexEngine& engine() { return engine_; }
  std::vector<Demand>& demands() { return demands_; }

  int add_demand(const Request& r, double volume) {
    Demand d;
    d.id = r.id;
    d.src = r.src;
    d.dst = r.dst;
    d.volume = volume;
    d.deadline = r.deadline;
    d.last = iv_.last_for(r.deadline);
    d.row = engine_.add_row(RowSense::kEqual, volume);
    demands_.push_back(std::move(d));
    return static_cast<int>(demands_.size()) - 1;
  }

  void set_volume(int demand, double volume) {
    demands_[sz(demand)].volume = volume;
    engine_.set_rhs(demands_[sz(demand)].row, volume);
  }

  // Index of `path` in the demand's pool, appending it when new.
  int add_path(int demand, const Path& path) {
    Demand& d = demands_[sz(demand)];
    for (std::size_t i = 0; i < d.paths.size(); ++i) {
      if (d.paths[i] == path) return static_cast<int>(i);
    }
    d.paths.push_back(path);
    d.has.emplace_back(sz(iv_.count()), 0);
    return static_cast<int>(d.paths.size()) - 1;
  }

  bool has_column(int demand, int path, int k) const {
    return demands_[sz(demand)].has[sz(path)][sz(k)] != 0;
  }

  void add_column(int demand, int path, int k) {
    Demand& d = demands_[sz(demand)];
    if (d.has[sz(path)][sz(k)]) return;
    d.has[sz(path)][sz(k)] = 1;
    entries_.clear();
    entries_.push_back({d.row, 1.0});
    for (ChannelId c : d.paths[sz(path)].channels) entries_.push_back({cap_row(c, k), 1.0});
    engine_.add_column(0.0, 0.0, kInfinity, entries_);
    columns_.push_back({demand, path, k});
  }

  // Columns of the demand for every eligible interval.
  void add_all_intervals(int demand, int path) {
    for (int k = 0; k <= demands_[sz(demand)].last; ++k) add_column(demand, path, k);
  }

  int cap_row(ChannelId c, int k) const {
    const int row = cap_row_[sz(c * iv_.count() + k)];
    if (row < 0) throw std::logic_error("interval LP: channel " + std::to_string(c) + " has no row");
    return row;
  }

  // -(y_demand + sum of y over the path's capacity rows in interval k).
  double reduced_cost(int demand, const Path& path, int k) const {
    const std::vector<double>& y = engine_.duals();
    double s = -y[sz(demands_[sz(demand)].row)];
    for (ChannelId c : path.channels) s -= y[sz(cap_row(c, k))];
    return s;
  }

  // Dual price of capacity (channel, interval), as a non-negative length.
  double dual_length(ChannelId c, int k) const {
    const int row = cap_row_[sz(c * iv_.count() + k)];
    return row < 0 ? 0.0 : std::max(0.0, -engine_.duals()[sz(row)]);
  }

  double utilization() const { return engine_.value(z_col_); }

  // Solves in two stages, each followed by pricing rounds through `price`
  // until no column enters: first with z pinned at 1, a pure feasibility
  // problem that decides admission, then (minimax only) with z free in
  // [0, 1] and minimized. Returns kInfeasible when the demands do not fit.
  template <typename Pricer>
  LpStatus solve(Pricer&& price, int max_rounds, int* rounds) {
    engine_.set_bounds(z_col_, 1.0, 1.0);
    LpStatus status = solve_priced(price, max_rounds, rounds);
    if (status != LpStatus::kOptimal || objective_ == LpObjective::kFeasibility) return status;
    engine_.set_bounds(z_col_, 0.0, 1.0);
    status = solve_priced(price, max_rounds, rounds);
    // Stage one's point stays feasible, so anything else is numerical.
    return status == LpStatus::kInfeasible ? LpStatus::kIterationLimit : status;
  }

  // Per-slot plan of every demand with positive volume, each demand scaled
  // to meet its volume exactly.
  std::vector<RequestPlan> extract() const {
    const Slot horizon = iv_.ends.empty() ? iv_.now : iv_.ends.back();
    const std::size_t slots = static_cast<std::size_t>(horizon - iv_.now);
    std::vector<std::vector<std::vector<double>>> vol(demands_.size());
    std::vector<double> total(demands_.size(), 0.0);
    for (std::size_t i = 0; i < demands_.size(); ++i) {
      vol[i].assign(demands_[i].paths.size(), std::vector<double>(sz(iv_.count()), 0.0));
    }
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      const Column& col = columns_[j];
      const double v = engine_.value(static_cast<int>(j) + first_column());
      if (v <= kDropValue) continue;
      vol[sz(col.demand)][sz(col.path)][sz(col.interval)] += v;
      total[sz(col.demand)] += v;
    }
    std::vector<RequestPlan> plan;
    for (std::size_t i = 0; i < demands_.size(); ++i) {
      const Demand& d = demands_[i];
      if (d.volume <= 0.0) continue;
      if (!(total[i] > 0.0)) {
        throw std::runtime_error("LP solution carries no volume for request " + std::to_string(d.id));
      }
      const double scale = d.volume / total[i];
      RequestPlan rp;
      rp.id = d.id;
      for (std::size_t p = 0; p < d.paths.size(); ++p) {
        PathPlan pp;
        pp.path = d.paths[p];
        pp.per_slot.assign(slots, 0.0);
        bool any = false;
        for (int k = 0; k < iv_.count(); ++k) {
          const double v = vol[i][p][sz(k)];
          if (v <= 0.0) continue;
          any = true;
          const double rate = v * scale / iv_.length(k);
          for (Slot t = iv_.begin(k) + 1; t <= iv_.ends[sz(k)]; ++t) {
            pp.per_slot[static_cast<std::size_t>(t - iv_.now - 1)] = rate;
          }
        }
        if (any) rp.paths.push_back(std::move(pp));
      }
      plan.push_back(std::move(rp));
    }
    return plan;
  }

 private:
  template <typename Pricer>
  LpStatus solve_priced(Pricer&& price, int max_rounds, int* rounds) {
    for (;;) {
      const LpStatus status = engine_.solve();
      ++*rounds;
      if (status == LpStatus::kIterationLimit || status == LpStatus::kUnbounded) return status;
      // Infeasible restricted problems price with the phase-1 multipliers.
      if (price(*this) == 0) return status;
      if (*rounds >= max_rounds) return LpStatus::kIterationLimit;
    }
  }

  static constexpr int first_column() { return 1; }

  Intervals iv_;
  LpObjective objective_;
  SimplexEngine engine_;
  std::vector<int> cap_row_;
  int z_col_ = -1;
  std::vector<Demand> demands_;
  std::vector<Column> columns_;
  std::vector<SparseEntry> entries_;
};

Intervals make_intervals(Slot now, std::span<const ActiveDemand> active, const Request& incoming) {
  Intervals iv;
  iv.now = now;
  iv.ends.push_back(incoming.deadline);
  for (const ActiveDemand& a : active) iv.ends.push_back(a.request.deadline);
  std::sort(iv.ends.begin(), iv.ends.end());
  iv.ends.erase(std::unique(iv.ends.begin(), iv.ends.end()), iv.ends.end());
  return iv;
}

void require_demands(Slot now, std::span<const ActiveDemand> active, const Request& incoming) {
  for (const ActiveDemand& a : active) {
    if (a.request.deadline <= now) {
      throw std::logic_error("active request " + std::to_string(a.request.id) + " is past its deadline");
    }
    if (a.request.id == incoming.id) {
      throw std::logic_error("request id " + std::to_string(incoming.id) + " is already active");
    }
  }
  if (incoming.deadline <= now) throw std::logic_error("incoming request has no future slot");
}

// Shortest paths under non-negative channel lengths from `src`; ties go to
// fewer hops, then the lower predecessor channel.
struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<int> hops;
  std::vector<ChannelId> pred;
};

ShortestPathTree dijkstra(const Topology& topo, NodeId src, const std::vector<double>& length) {
  const std::size_t n = sz(topo.node_count());
  ShortestPathTree tree{std::vector<double>(n, kInfinity), std::vector<int>(n, 0),
                        std::vector<ChannelId>(n, -1)};
  using Item = std::tuple<double, int, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  std::vector<char> done(n, 0);
  tree.dist[sz(src)] = 0.0;
  queue.emplace(0.0, 0, src);
  while (!queue.empty()) {
    const auto [d, h, u] = queue.top();
    queue.pop();
    if (done[sz(u)]) continue;
    done[sz(u)] = 1;
    for (const Neighbor& nb : topo.neighbors(u)) {
      const ChannelId c = topo.channel(nb.edge, u);
      const double nd = d + length[sz(c)];
      const std::size_t v = sz(nb.node);
      if (done[v]) continue;
      if (nd < tree.dist[v] || (nd == tree.dist[v] && h + 1 < tree.hops[v])) {
        tree.dist[v] = nd;
        tree.hops[v] = h + 1;
        tree.pred[v] = c;
        queue.emplace(nd, h + 1, nb.node);
      }
    }
  }
  return tree;
}

Path tree_path(const Topology& topo, const ShortestPathTree& tree, NodeId src, NodeId dst) {
  std::vector<NodeId> nodes{dst};
  for (NodeId at = dst; at != src;) {
    at = topo.channel_from(tree.pred[sz(at)]);
    nodes.push_back(at);
  }
  std::reverse(nodes.begin(), nodes.end());
  return path_from_nodes(topo, nodes);
}

// Adds every column with negative reduced cost (at most one per demand and
// interval). Returns the number added.
int price_columns(IntervalLp& lp, const Topology& topo, const BaselineKind& kind, PathCache& cache) {
  int added = 0;
  std::vector<Demand>& demands = lp.demands();
  const int intervals = lp.intervals().count();
  if (kind.family == BaselineFamily::kKspLp) {
    for (std::size_t i = 0; i < demands.size(); ++i) {
      const int di = static_cast<int>(i);
      const std::vector<Path>& candidates = cache.get(demands[i].src, demands[i].dst);
      for (int k = 0; k <= demands[i].last; ++k) {
        int best = -1;
        double best_rc = -kPricingTolerance;
        for (std::size_t p = 0; p < candidates.size(); ++p) {
          const double rc = lp.reduced_cost(di, candidates[p], k);
          if (rc < best_rc) {
            best_rc = rc;
            best = static_cast<int>(p);
          }
        }
        if (best < 0) continue;
        const int pi = lp.add_path(di, candidates[sz(best)]);
        if (lp.has_column(di, pi, k)) continue;
        lp.add_column(di, pi, k);
        ++added;
      }
    }
    return added;
  }

  std::vector<double> length(sz(topo.channel_count()));
  for (int k = 0; k < intervals; ++k) {
    for (ChannelId c = 0; c < topo.channel_count(); ++c) length[sz(c)] = lp.dual_length(c, k);
    std::map<NodeId, ShortestPathTree> trees;
    for (std::size_t i = 0; i < demands.size(); ++i) {
      Demand& d = demands[i];
      if (k > d.last) continue;
      auto it = trees.find(d.src);
      if (it == trees.end()) it = trees.emplace(d.src, dijkstra(topo, d.src, length)).first;
      if (!std::isfinite(it->second.dist[sz(d.dst)])) continue;
      const Path path = tree_path(topo, it->second, d.src, d.dst);
      const int di = static_cast<int>(i);
      if (lp.reduced_cost(di, path, k) >= -kPricingTolerance) continue;
      const int pi = lp.add_path(di, path);
      if (lp.has_column(di, pi, k)) continue;
      lp.add_column(di, pi, k);
      ++added;
    }
  }
  return added;
}

std::vector<char> all_channels(const Topology& topo) {
  return std::vector<char>(sz(topo.channel_count()), 1);
}

void mark(std::vector<char>& used, const Path& p) {
  for (ChannelId c : p.channels) used[sz(c)] = 1;
}

}  // namespace

BaselineKind BaselineKind::parse(const std::string& tag) {
  const auto colon = tag.find(':');
  const std::string name = tag.substr(0, colon);
  int k = 0;
  if (colon != std::string::npos) {
    const std::string num = tag.substr(colon + 1);
    std::size_t used = 0;
    try {
      k = std::stoi(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != num.size() || num.empty() || k < 1) {
      throw std::invalid_argument("bad path budget in scheduler tag '" + tag + "'");
    }
  }
  BaselineKind kind;
  if (name == "global-lp") {
    if (colon != std::string::npos) throw std::invalid_argument("global-lp takes no path budget");
    kind.family = BaselineFamily::kGlobalLp;
  } else if (name == "ksp-lp") {
    if (k == 0) throw std::invalid_argument("ksp-lp needs a path budget, e.g. ksp-lp:3");
    kind.family = BaselineFamily::kKspLp;
    kind.k = k;
  } else if (name == "pip-pmc" || name == "pip-spmc") {
    kind.family = name == "pip-pmc" ? BaselineFamily::kPipPmc : BaselineFamily::kPipSpmc;
    kind.k = k == 0 ? 20 : k;
  } else {
    throw std::invalid_argument("unknown scheduler '" + tag + "'");
  }
  return kind;
}

std::string BaselineKind::tag() const {
  switch (family) {
    case BaselineFamily::kGlobalLp:
      return "global-lp";
    case BaselineFamily::kKspLp:
      return "ksp-lp:" + std::to_string(k);
    case BaselineFamily::kPipPmc:
      return "pip-pmc:" + std::to_string(k);
    case BaselineFamily::kPipSpmc:
      return "pip-spmc:" + std::to_string(k);
  }
  return "?";
}

LpObjective parse_objective(const std::string& name) {
  if (name == "minimax") return LpObjective::kMinimax;
  if (name == "feasibility") return LpObjective::kFeasibility;
  throw std::invalid_argument("unknown LP objective '" + name + "'");
}

std::string to_string(LpObjective objective) {
  return objective == LpObjective::kMinimax ? "minimax" : "feasibility";
}

const std::vector<Path>& PathCache::get(NodeId src, NodeId dst) {
  auto key = std::make_pair(src, dst);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, k_shortest_paths(*topo_, src, dst, k_)).first;
  return it->second;
}

LpModel build_multipath_model(const Topology& topo, Slot now, std::span<const ActiveDemand> active,
                              const Request& incoming, const BaselineKind& kind,
                              LpObjective objective, PathCache* paths) {
  if (!kind.multipath()) throw std::invalid_argument("build_multipath_model: not a multipath kind");
  require_demands(now, active, incoming);
  std::vector<const Request*> reqs;
  for (const ActiveDemand& a : active) reqs.push_back(&a.request);
  reqs.push_back(&incoming);
  auto volume_of = [&](const Request* r) { return r == &incoming ? r->volume : r->residual; };

  Slot horizon = now + 1;
  for (const Request* r : reqs) horizon = std::max(horizon, r->deadline);

  LpModel model;
  model.set_sense(ObjectiveSense::kMinimize);
  int z = -1;
  if (objective == LpObjective::kMinimax) z = model.add_variable("z", 1.0);

  // cap[c][t - now - 1]
  const int channels = topo.channel_count();
  std::vector<std::vector<int>> cap(sz(channels));
  for (ChannelId c = 0; c < channels; ++c) {
    for (Slot t = now + 1; t <= horizon; ++t) {
      const double capacity = topo.channel_capacity(c);
      const std::string name = "cap_c" + std::to_string(c) + "_t" + std::to_string(t);
      if (z >= 0) {
        cap[sz(c)].push_back(model.add_row(name, RowSense::kLessEqual, 0.0, {{z, -capacity}}));
      } else {
        cap[sz(c)].push_back(model.add_row(name, RowSense::kLessEqual, capacity));
      }
    }
  }

  std::optional<PathCache> own;
  if (kind.family == BaselineFamily::kKspLp && paths == nullptr) {
    own.emplace(topo, kind.k);
    paths = &*own;
  }

  for (const Request* r : reqs) {
    const std::string rid = "r" + std::to_string(r->id);
    const int dem = model.add_row("dem_" + rid, RowSense::kEqual, volume_of(r));
    if (kind.family == BaselineFamily::kKspLp) {
      const std::vector<Path>& candidates = paths->get(r->src, r->dst);
      for (std::size_t p = 0; p < candidates.size(); ++p) {
        for (Slot t = now + 1; t <= r->deadline; ++t) {
          const int x = model.add_variable(rid + "_p" + std::to_string(p) + "_t" + std::to_string(t));
          model.add_coefficient(dem, x, 1.0);
          for (ChannelId c : candidates[p].channels) {
            model.add_coefficient(cap[sz(c)][static_cast<std::size_t>(t - now - 1)], x, 1.0);
          }
        }
      }
      continue;
    }
    // Edge flows: conservation at every node except the endpoints in each
    // slot; the net outflow of the source over all slots is the demand.
    for (Slot t = now + 1; t <= r->deadline; ++t) {
      std::vector<int> balance(sz(topo.node_count()), -1);
      for (NodeId n = 0; n < topo.node_count(); ++n) {
        if (n == r->src || n == r->dst) continue;
        balance[sz(n)] = model.add_row("flow_" + rid + "_n" + std::to_string(n) + "_t" + std::to_string(t),
                                       RowSense::kEqual, 0.0);
      }
      for (ChannelId c = 0; c < channels; ++c) {
        const int f = model.add_variable(rid + "_c" + std::to_string(c) + "_t" + std::to_string(t));
        model.add_coefficient(cap[sz(c)][static_cast<std::size_t>(t - now - 1)], f, 1.0);
        const NodeId from = topo.channel_from(c);
        const NodeId to = topo.channel_to(c);
        if (balance[sz(from)] >= 0) model.add_coefficient(balance[sz(from)], f, -1.0);
        if (balance[sz(to)] >= 0) model.add_coefficient(balance[sz(to)], f, 1.0);
        if (from == r->src) model.add_coefficient(dem, f, 1.0);
        if (to == r->src) model.add_coefficient(dem, f, -1.0);
      }
    }
  }
  return model;
}

AdmissionResult admit_multipath(const Topology& topo, Slot now, std::span<const ActiveDemand> active,
                                const Request& incoming, const BaselineKind& kind,
                                const BaselineOptions& options, PathCache& paths) {
  if (!kind.multipath()) throw std::invalid_argument("admit_multipath: not a multipath kind");
  require_demands(now, active, incoming);
  AdmissionResult result;

  std::vector<char> used;
  if (kind.family == BaselineFamily::kGlobalLp) {
    used = all_channels(topo);
  } else {
    used.assign(sz(topo.channel_count()), 0);
    for (const ActiveDemand& a : active) {
      for (const Path& p : paths.get(a.request.src, a.request.dst)) mark(used, p);
    }
    for (const Path& p : paths.get(incoming.src, incoming.dst)) mark(used, p);
  }
  IntervalLp lp(topo, make_intervals(now, active, incoming), options.objective, options.simplex, used);

  // Start every demand on paths it already uses (or its first candidate).
  auto seed = [&](const Request& r, double volume, const std::vector<Path>& known) -> bool {
    const int d = lp.add_demand(r, volume);
    std::vector<Path> start;
    if (kind.family == BaselineFamily::kKspLp) {
      const std::vector<Path>& cand = paths.get(r.src, r.dst);
      for (const Path& p : known) {
        if (std::find(cand.begin(), cand.end(), p) != cand.end()) start.push_back(p);
      }
      if (start.empty() && !cand.empty()) start.push_back(cand.front());
    } else {
      start = known;
      if (start.empty()) {
        if (auto p = shortest_path(topo, r.src, r.dst)) start.push_back(*p);
      }
    }
    if (start.empty()) return false;
    for (const Path& p : start) lp.add_all_intervals(d, lp.add_path(d, p));
    return true;
  };
  for (const ActiveDemand& a : active) {
    if (!seed(a.request, a.request.residual, a.known_paths)) {
      throw std::logic_error("active request " + std::to_string(a.request.id) + " has no path");
    }
  }
  if (!seed(incoming, incoming.volume, {})) {
    result.reason = "no path";
    return result;
  }

  const LpStatus status = lp.solve([&](IntervalLp& m) { return price_columns(m, topo, kind, paths); },
                                   options.max_pricing_rounds, &result.pricing_rounds);
  result.status = status;
  result.pivots = lp.engine().iterations();
  if (status == LpStatus::kIterationLimit || status == LpStatus::kUnbounded) {
    std::cerr << "warning: " << kind.tag() << " request " << incoming.id << ": solver stopped ("
              << to_string(status) << "), rejecting\n";
    result.reason = "solver " + to_string(status);
    return result;
  }
  if (status != LpStatus::kOptimal) {
    result.reason = "insufficient capacity";
    return result;
  }
  result.objective = lp.utilization();
  result.plan = lp.extract();
  result.admitted = true;
  return result;
}

AdmissionResult admit_pip(const Topology& topo, Slot now, std::span<const ActiveDemand> active,
                          const Request& incoming, const BaselineKind& kind,
                          const BaselineOptions& options, PathCache& paths) {
  if (kind.multipath()) throw std::invalid_argument("admit_pip: not a PIP kind");
  require_demands(now, active, incoming);
  AdmissionResult result;
  const std::vector<Path>& candidates = paths.get(incoming.src, incoming.dst);
  if (candidates.empty()) {
    result.reason = "no path";
    return result;
  }

  std::vector<char> used(sz(topo.channel_count()), 0);
  for (const ActiveDemand& a : active) {
    if (a.known_paths.empty()) {
      throw std::logic_error("active request " + std::to_string(a.request.id) + " has no fixed path");
    }
    mark(used, a.known_paths.front());
  }
  for (const Path& p : candidates) mark(used, p);

  IntervalLp base(topo, make_intervals(now, active, incoming), options.objective, options.simplex, used);
  for (const ActiveDemand& a : active) {
    const int d = base.add_demand(a.request, a.request.residual);
    base.add_all_intervals(d, base.add_path(d, a.known_paths.front()));
  }
  const int fresh = base.add_demand(incoming, 0.0);
  // Pinned paths leave nothing to price.
  auto no_pricing = [](IntervalLp&) { return 0; };
  const LpStatus base_status = base.solve(no_pricing, 2, &result.pricing_rounds);
  result.pivots += base.engine().iterations();
  if (base_status != LpStatus::kOptimal) {
    std::cerr << "warning: " << kind.tag() << " request " << incoming.id
              << ": current allocation no longer solves (" << to_string(base_status) << "), rejecting\n";
    result.status = base_status;
    result.reason = "current allocation infeasible";
    return result;
  }
  const double z_base = base.utilization();
  const Intervals& iv = base.intervals();
  const int last = iv.last_for(incoming.deadline);

  std::optional<IntervalLp> best;
  int best_hops = 0;
  double best_z = kInfinity;
  bool limit_hit = false;
  for (const Path& path : candidates) {
    if (best && kind.family == BaselineFamily::kPipSpmc && path.hops() > best_hops) break;
    double narrow = kInfinity;
    for (ChannelId c : path.channels) narrow = std::min(narrow, topo.channel_capacity(c));
    double bound = 0.0;
    for (int k = 0; k <= last; ++k) bound += iv.length(k) * narrow;
    if (incoming.volume > bound + kEps) continue;

    IntervalLp trial = base;
    const std::int64_t before = trial.engine().iterations();
    trial.add_all_intervals(fresh, trial.add_path(fresh, path));
    trial.set_volume(fresh, incoming.volume);
    int rounds = 0;
    const LpStatus status = trial.solve(no_pricing, 2, &rounds);
    result.pivots += trial.engine().iterations() - before;
    ++result.candidates_solved;
    if (status == LpStatus::kIterationLimit || status == LpStatus::kUnbounded) {
      limit_hit = true;
      continue;
    }
    if (status != LpStatus::kOptimal) continue;
    const double z = trial.utilization();
    if (!best || z < best_z - kAdmitSlack) {
      best_z = z;
      best_hops = path.hops();
      best.emplace(std::move(trial));
    }
    // Adding demand cannot lower the optimum below the base allocation's.
    if (kind.family == BaselineFamily::kPipPmc && best_z <= z_base + kAdmitSlack) break;
  }
  if (!best) {
    if (limit_hit) {
      std::cerr << "warning: " << kind.tag() << " request " << incoming.id
                << ": solver iteration cap on some candidates, rejecting\n";
      result.status = LpStatus::kIterationLimit;
      result.reason = "solver iteration limit";
    } else {
      result.status = LpStatus::kInfeasible;
      result.reason = "no feasible candidate path";
    }
    return result;
  }
  result.status = LpStatus::kOptimal;
  result.objective = best_z;
  result.plan = best->extract();
  result.admitted = true;
  return result;
}

double deliverable_volume(const AllocationGrid& grid, const Path& path, Slot deadline) {
  double narrow = kInfinity;
  for (ChannelId c : path.channels) narrow = std::min(narrow, grid.capacity(c));
  double total = 0.0;
  for (Slot t = grid.now() + 1; t <= deadline; ++t) {
    total += t <= grid.end() ? grid.path_free(path.channels, t) : narrow;
  }
  return total;
}

OracleResult oracle_single_path_admissible(const Topology& topo, const AllocationGrid& grid,
                                           const Request& request, int max_nodes) {
  if (topo.node_count() > max_nodes) {
    throw std::length_error("single-path oracle refuses topologies above " +
                            std::to_string(max_nodes) + " nodes");
  }
  OracleResult out;
  for (Path& p : enumerate_simple_paths(topo, request.src, request.dst)) {
    const double v = deliverable_volume(grid, p, request.deadline);
    out.best = std::max(out.best, v);
    out.per_path.emplace_back(std::move(p), v);
  }
  out.admissible = !out.per_path.empty() && out.best + kEps >= request.volume;
  return out;
}

LpBaselineScheduler::LpBaselineScheduler(const Topology& topo, BaselineKind kind,
                                         BaselineOptions options, Slot start)
    : topo_(&topo),
      kind_(kind),
      options_(std::move(options)),
      paths_(topo, std::max(kind.k, 1)),
      grid_(topo.channel_capacities(), start) {
  grid_.set_capacity_tolerance(kTolerance);
}

bool LpBaselineScheduler::admit(Request& request) {
  last_ = AdmissionResult{};
  if (request.arrival > now()) {
    throw std::logic_error("admit: request " + std::to_string(request.id) + " arrives in the future");
  }
  if (active_.count(request.id)) {
    throw std::logic_error("admit: request id " + std::to_string(request.id) + " reused");
  }
  auto reject = [&](std::string why) {
    last_.reason = std::move(why);
    request.state = RequestState::kRejected;
    return false;
  };
  if (request.src < 0 || request.dst < 0 || request.src >= topo_->node_count() ||
      request.dst >= topo_->node_count()) {
    return reject("endpoint outside the topology");
  }
  if (request.src == request.dst) return reject("source equals destination");
  if (!(request.volume > kEps) || !std::isfinite(request.volume)) return reject("non-positive volume");
  if (request.deadline <= now()) return reject("deadline leaves no schedulable slot");

  const std::vector<ActiveDemand> demands = active_demands();
  last_ = kind_.multipath()
              ? admit_multipath(*topo_, now(), demands, request, kind_, options_, paths_)
              : admit_pip(*topo_, now(), demands, request, kind_, options_, paths_);
  pivots_ += last_.pivots;
  if (!last_.admitted) return reject(last_.reason);
  try {
    install(last_, request);
  } catch (const std::logic_error& e) {
    std::cerr << "warning: " << tag() << " request " << request.id
              << ": LP allocation failed verification (" << e.what() << "), rejecting\n";
    last_.admitted = false;
    return reject("allocation failed verification");
  }
  request.state = RequestState::kAdmitted;
  request.residual = request.volume;
  request.path = active_.at(request.id).paths.front();
  active_.at(request.id).request = request;
  return true;
}

std::vector<ActiveDemand> LpBaselineScheduler::active_demands() const {
  std::vector<ActiveDemand> out;
  out.reserve(active_.size());
  for (const auto& [id, a] : active_) out.push_back({a.request, a.paths});
  return out;
}

void LpBaselineScheduler::install(const AdmissionResult& result, const Request& incoming) {
  AllocationGrid grid(topo_->channel_capacities(), now());
  grid.set_capacity_tolerance(kTolerance);
  std::map<RequestId, Active> next;
  for (const RequestPlan& rp : result.plan) {
    const bool fresh = rp.id == incoming.id;
    auto old = active_.find(rp.id);
    if (!fresh && old == active_.end()) throw std::logic_error("plan names unknown request");
    Active a{fresh ? incoming : old->second.request, fresh ? std::vector<Path>{} : old->second.paths};
    const double want = fresh ? incoming.volume : a.request.residual;
    grid.extend_window(a.request.deadline);
    double planned = 0.0;
    for (const PathPlan& pp : rp.paths) {
      auto it = std::find(a.paths.begin(), a.paths.end(), pp.path);
      const auto index = static_cast<FlowId>(it - a.paths.begin());
      if (it == a.paths.end()) a.paths.push_back(pp.path);
      if (index >= kFlowStride) throw std::logic_error("too many paths for one request");
      const FlowId flow = a.request.id * kFlowStride + index;
      for (std::size_t i = 0; i < pp.per_slot.size(); ++i) {
        const double v = pp.per_slot[i];
        if (v <= 0.0) continue;
        const Slot t = now() + 1 + static_cast<Slot>(i);
        if (t > a.request.deadline) throw std::logic_error("plan schedules past the deadline");
        grid.add_path_share(pp.path.channels, t, flow, v);
        planned += v;
      }
    }
    if (std::abs(planned - want) > kTolerance * std::max(1.0, want)) {
      throw std::logic_error("plan moves " + std::to_string(planned) + " of " + std::to_string(want));
    }
    next.emplace(a.request.id, std::move(a));
  }
  if (next.size() != active_.size() + 1) throw std::logic_error("plan drops an active request");
  grid_ = std::move(grid);
  active_ = std::move(next);
}

const Path& LpBaselineScheduler::flow_path(FlowId flow) const {
  const auto& a = active_.at(flow / kFlowStride);
  return a.paths.at(static_cast<std::size_t>(flow % kFlowStride));
}

BoundaryStats LpBaselineScheduler::boundary() {
  BoundaryStats stats;
  if (!options_.fill_next_slot) return stats;
  const Slot next = now() + 1;
  for (Slot t = now() + 2; t <= end(); ++t) {
    for (ChannelId c = 0; c < grid_.channel_count(); ++c) {
      const std::vector<Share> here(grid_.shares(c, t).begin(), grid_.shares(c, t).end());
      for (const Share& s : here) {
        const Path& p = flow_path(s.flow);
        if (*std::min_element(p.channels.begin(), p.channels.end()) != c) continue;
        const double room = grid_.path_free(p.channels, next);
        const double v = std::min(s.volume, room);
        if (v <= kEps) continue;
        stats.pulled += grid_.move_share(p.channels, t, next, s.flow, v);
      }
    }
  }
  return stats;
}

SlotSchedule LpBaselineScheduler::walk() {
  const Shipment shipped = grid_.advance();
  SlotSchedule out;
  out.slot = shipped.slot;
  for (const Share& s : shipped.flows) {
    Active& a = active_.at(s.flow / kFlowStride);
    a.request.residual -= s.volume;
    out.rows.push_back({a.request.id, s.volume, flow_path(s.flow).nodes});
  }
  for (auto it = active_.begin(); it != active_.end();) {
    Active& a = it->second;
    if (a.request.residual <= kTolerance * std::max(1.0, a.request.volume)) {
      for (std::size_t i = 0; i < a.paths.size(); ++i) {
        grid_.remove_flow(a.paths[i].channels, a.request.id * kFlowStride + static_cast<FlowId>(i));
      }
      it = active_.erase(it);
      continue;
    }
    if (a.request.deadline <= now()) {
      throw InvariantViolation("request " + std::to_string(a.request.id) + " missed deadline " +
                               std::to_string(a.request.deadline) + " with " +
                               std::to_string(a.request.residual) + " left");
    }
    ++it;
  }
  return out;
}

void LpBaselineScheduler::check_invariants() const {
  grid_.check_invariants();
  std::map<FlowId, std::map<ChannelId, double>> per_flow;
  for (ChannelId c = 0; c < grid_.channel_count(); ++c) {
    for (Slot t = now() + 1; t <= end(); ++t) {
      for (const Share& s : grid_.shares(c, t)) {
        const auto it = active_.find(s.flow / kFlowStride);
        if (it == active_.end()) {
          throw InvariantViolation("share of inactive flow " + std::to_string(s.flow));
        }
        const std::size_t index = static_cast<std::size_t>(s.flow % kFlowStride);
        if (index >= it->second.paths.size()) throw InvariantViolation("share of unknown path");
        const Path& p = it->second.paths[index];
        if (std::find(p.channels.begin(), p.channels.end(), c) == p.channels.end()) {
          throw InvariantViolation("flow " + std::to_string(s.flow) + " has a share off its path");
        }
        if (t > it->second.request.deadline) {
          throw InvariantViolation("flow " + std::to_string(s.flow) + " scheduled after its deadline");
        }
        per_flow[s.flow][c] += s.volume;
      }
    }
  }
  std::map<RequestId, double> per_request;
  for (const auto& [flow, by_channel] : per_flow) {
    const double first = by_channel.begin()->second;
    const Path& p = flow_path(flow);
    if (by_channel.size() != p.channels.size()) {
      throw InvariantViolation("flow " + std::to_string(flow) + " missing on part of its path");
    }
    for (const auto& [c, v] : by_channel) {
      if (std::abs(v - first) > kTolerance) {
        throw InvariantViolation("flow " + std::to_string(flow) + " differs between path channels");
      }
    }
    per_request[flow / kFlowStride] += first;
  }
  for (const auto& [id, a] : active_) {
    const double have = per_request.count(id) ? per_request.at(id) : 0.0;
    if (std::abs(have - a.request.residual) > kTolerance * std::max(1.0, a.request.volume)) {
      throw InvariantViolation("request " + std::to_string(id) + " holds " + std::to_string(have) +
                               " for residual " + std::to_string(a.request.residual));
    }
  }
}

}  // namespace dcroute
