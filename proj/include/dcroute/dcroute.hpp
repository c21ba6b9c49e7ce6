#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcroute/paths.hpp"
#include "dcroute/request.hpp"
#include "dcroute/timeline.hpp"
#include "dcroute/topology.hpp"

namespace dcroute {

// Label reached at the destination by the edge-weighted BFS.
struct BfsLabel {
  int hops = 0;
  double bottleneck = 0.0;  // max channel weight on the tree path
  double sum = 0.0;         // total channel weight on the tree path
};

// Breadth-first search from src over channels with use[c] set, neighbors in
// ascending id order. Each channel is weighted by weight[c] (S(dl, c) in the
// scheduler). Returns the label at dst, or nullopt when dst is unreachable.
// When `path_out` is given it receives the tree path to dst.
std::optional<BfsLabel> bfs_test(const Topology& topo, std::span<const double> weight,
                                 std::span<const char> use, NodeId src, NodeId dst,
                                 Path* path_out = nullptr);
std::optional<BfsLabel> bfs_test(const Topology& topo, const AllocationGrid& grid,
                                 const Request& request);

// Iterative edge-pruned BFS path selection: channels are disabled in order of
// decreasing S(dl, c), keeping the candidate with the smallest
// hops * volume + sum (ties: smaller bottleneck). The grid window must cover
// the request deadline.
std::optional<Path> select_path(const Topology& topo, const AllocationGrid& grid,
                                const Request& request);

// As-late-as-possible back-fill of request.volume on `path`, slot by slot
// from the deadline down to t_now+2, each slot taking the path-wide residual.
// Returns true iff the full volume fits. With apply set the shares are
// committed, and only when the whole volume fits.
bool path_allocate(AllocationGrid& grid, const Path& path, const Request& request, bool apply);

// DCRoute scheduler state: the allocation grid plus the active requests,
// keyed by request id (which is also their flow id in the grid).
class DcRouteScheduler {
 public:
  explicit DcRouteScheduler(const Topology& topo, Slot start = 0);
  // The topology must outlive the scheduler.
  DcRouteScheduler(Topology&&, Slot = 0) = delete;

  const Topology& topology() const { return *topo_; }
  const AllocationGrid& grid() const { return grid_; }
  Slot now() const { return grid_.now(); }
  Slot end() const { return grid_.end(); }
  const std::map<RequestId, Request>& active() const { return active_; }

  // Admission (runs on arrival in slot t_now). On success the request is
  // stored as admitted with its path; on rejection the grid is untouched.
  // `request` is updated with the outcome either way.
  bool allocate(Request& request);

  // Pulls as much traffic as possible into slot t_now+1 from the closest
  // future slots. Returns the volume moved.
  double pull_back();
  // Pushes traffic in slots >= t_now+2 toward deadlines until no share can
  // move later. Returns the volume moved.
  double push_forward();
  int last_push_passes() const { return last_push_passes_; }

  // Finalizes slot t_now+1, deducts it from residual demands and advances
  // the clock. Throws InvariantViolation if an admitted request reaches its
  // deadline with residual demand left.
  SlotSchedule walk();

  // Requests finished so far; each entry leaves the active set on completion.
  const std::vector<Request>& completed() const { return completed_; }

  // Why the last allocate() call rejected, empty after an admission.
  const std::string& last_reject_reason() const { return reject_reason_; }

  // Grid invariants, single-path placement, residual conservation and the
  // ALAP fixpoint; PullBack maximality too when `pulled` is set (valid from
  // pull_back until the next allocate). Throws InvariantViolation.
  void check_invariants(bool pulled) const;
  // Individual checks, returning a description of the first violation.
  std::optional<std::string> alap_violation() const;
  std::optional<std::string> pullback_violation() const;

 private:
  // Channel at which a request's shares are visited during sweeps: the
  // lowest channel id on its path.
  ChannelId anchor(const Request& r) const;

  const Topology* topo_;
  AllocationGrid grid_;
  std::map<RequestId, Request> active_;
  std::vector<Request> completed_;
  int last_push_passes_ = 0;
  std::string reject_reason_;
};

}  // namespace dcroute
