#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dcroute/lp.hpp"
#include "dcroute/paths.hpp"
#include "dcroute/request.hpp"
#include "dcroute/scheduler.hpp"
#include "dcroute/timeline.hpp"
#include "dcroute/topology.hpp"

namespace dcroute {

enum class BaselineFamily { kGlobalLp, kKspLp, kPipPmc, kPipSpmc };

struct BaselineKind {
  BaselineFamily family = BaselineFamily::kGlobalLp;
  int k = 0;  // path budget; unused for global-lp

  // "global-lp", "ksp-lp:K", "pip-pmc[:K]", "pip-spmc[:K]" (PIP defaults to
  // K=20). Throws std::invalid_argument.
  static BaselineKind parse(const std::string& tag);
  std::string tag() const;
  bool multipath() const {
    return family == BaselineFamily::kGlobalLp || family == BaselineFamily::kKspLp;
  }
};

enum class LpObjective {
  // Minimize the largest per-(channel, slot) utilization z; admit iff z <= 1.
  kMinimax,
  // Pure feasibility: capacities fixed at 1x, zero objective.
  kFeasibility,
};

LpObjective parse_objective(const std::string& name);
std::string to_string(LpObjective objective);

struct BaselineOptions {
  LpObjective objective = LpObjective::kMinimax;
  // At each boundary move traffic into slot t_now+1 from the closest future
  // slots, as DCRoute's pull_back does.
  bool fill_next_slot = true;
  SimplexOptions simplex;
  // Pricing rounds per multipath admission before giving up (rejects).
  int max_pricing_rounds = 1000;
};

// K shortest paths per ordered node pair, computed on first use.
class PathCache {
 public:
  PathCache(const Topology& topo, int k) : topo_(&topo), k_(k) {}
  int k() const { return k_; }
  const std::vector<Path>& get(NodeId src, NodeId dst);

 private:
  const Topology* topo_;
  int k_;
  std::map<std::pair<NodeId, NodeId>, std::vector<Path>> cache_;
};

// An admitted request as seen by an LP re-solve: its residual demand and
// the paths it already uses (the fixed path for PIP, previously used paths
// for global-lp; ignored by ksp-lp).
struct ActiveDemand {
  Request request;
  std::vector<Path> known_paths;
};

struct PathPlan {
  Path path;
  std::vector<double> per_slot;  // per_slot[i] is slot t_now+1+i
};

struct RequestPlan {
  RequestId id = 0;
  std::vector<PathPlan> paths;
};

struct AdmissionResult {
  bool admitted = false;
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;  // minimax z on admission; 1 under the feasibility objective
  std::int64_t pivots = 0;
  int pricing_rounds = 0;
  int candidates_solved = 0;  // PIP only
  std::string reason;         // set on rejection
  // Allocation of every active request plus the new one, on admission.
  std::vector<RequestPlan> plan;
};

// Slot-level model for global-lp (edge flows with per-slot conservation at
// relay nodes) or ksp-lp (flows per candidate path and slot) over every
// active demand plus `incoming`, for slots t_now+1..deadline. The incoming
// request is admissible iff the model is feasible (minimax: optimum z <= 1).
LpModel build_multipath_model(const Topology& topo, Slot now, std::span<const ActiveDemand> active,
                              const Request& incoming, const BaselineKind& kind,
                              LpObjective objective, PathCache* paths = nullptr);

// Multipath admission. Solves the same problem as build_multipath_model
// with slots merged into the intervals between consecutive deadlines
// (lossless, since every slot of an interval offers the same capacity to
// the same demands) and path columns priced in on demand.
AdmissionResult admit_multipath(const Topology& topo, Slot now, std::span<const ActiveDemand> active,
                                const Request& incoming, const BaselineKind& kind,
                                const BaselineOptions& options, PathCache& paths);

// Single-path admission: one LP per candidate path of the new request, every
// active request pinned to its known_paths.front(). PMC keeps the feasible
// candidate with the smallest objective; SPMC the smallest objective among
// feasible candidates of minimal hop count. Candidates are tried in
// (hops, node sequence) order and ties keep the earlier one.
AdmissionResult admit_pip(const Topology& topo, Slot now, std::span<const ActiveDemand> active,
                          const Request& incoming, const BaselineKind& kind,
                          const BaselineOptions& options, PathCache& paths);

// sum over slots t_now+1..deadline of path_free(path, t).
double deliverable_volume(const AllocationGrid& grid, const Path& path, Slot deadline);

struct OracleResult {
  std::vector<std::pair<Path, double>> per_path;  // deliverable volume
  double best = 0.0;
  bool admissible = false;
};

// Exhaustive single-path admission check over every simple path. Throws
// std::length_error for topologies above `max_nodes` nodes.
OracleResult oracle_single_path_admissible(const Topology& topo, const AllocationGrid& grid,
                                           const Request& request, int max_nodes = 8);

// LP baseline as a slot-driven scheduler. After each admission the grid
// holds the LP allocation of all active requests, each (request, path) pair
// as its own flow.
class LpBaselineScheduler : public Scheduler {
 public:
  LpBaselineScheduler(const Topology& topo, BaselineKind kind, BaselineOptions options = {},
                      Slot start = 0);
  LpBaselineScheduler(Topology&&, BaselineKind, BaselineOptions = {}, Slot = 0) = delete;

  std::string tag() const override { return kind_.tag(); }
  Slot now() const override { return grid_.now(); }
  Slot end() const override { return grid_.end(); }
  std::size_t active_count() const override { return active_.size(); }
  bool admit(Request& request) override;
  BoundaryStats boundary() override;
  SlotSchedule walk() override;
  void check_invariants() const override;
  std::string dump() const override { return grid_.dump(); }
  std::int64_t solver_pivots() const override { return pivots_; }

  const AllocationGrid& grid() const { return grid_; }
  const AdmissionResult& last_result() const { return last_; }
  // Active requests with their residuals and paths, as the LP sees them.
  std::vector<ActiveDemand> active_demands() const;

  static constexpr FlowId kFlowStride = 4096;
  static constexpr double kTolerance = 1e-7;

 private:
  struct Active {
    Request request;
    std::vector<Path> paths;  // flow id = id * kFlowStride + index
  };

  void install(const AdmissionResult& result, const Request& incoming);
  const Path& flow_path(FlowId flow) const;

  const Topology* topo_;
  BaselineKind kind_;
  BaselineOptions options_;
  PathCache paths_;
  AllocationGrid grid_;
  std::map<RequestId, Active> active_;
  AdmissionResult last_;
  std::int64_t pivots_ = 0;
};

}  // namespace dcroute
