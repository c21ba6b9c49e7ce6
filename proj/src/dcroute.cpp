#include "dcroute/dcroute.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>

namespace dcroute {

namespace {

struct NodeLabel {
  bool visited = false;
  BfsLabel label;
  ChannelId pred = -1;
};

std::vector<double> deadline_weights(const AllocationGrid& grid, Slot deadline) {
  std::vector<double> w(static_cast<std::size_t>(grid.channel_count()));
  for (ChannelId c = 0; c < grid.channel_count(); ++c) {
    w[static_cast<std::size_t>(c)] = grid.prefix(c, deadline);
  }
  return w;
}

// Past this many sweeps push_forward gives up and reports it; every pass
// that moves something delays volume by at least one slot, so real runs stop
// after a handful.
constexpr int kMaxPushPasses = 10000;

}  // namespace

std::optional<BfsLabel> bfs_test(const Topology& topo, std::span<const double> weight,
                                 std::span<const char> use, NodeId src, NodeId dst,
                                 Path* path_out) {
  std::vector<NodeLabel> labels(static_cast<std::size_t>(topo.node_count()));
  std::vector<NodeId> queue;
  queue.reserve(labels.size());
  queue.push_back(src);
  labels[static_cast<std::size_t>(src)].visited = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId node = queue[head];
    const NodeLabel& here = labels[static_cast<std::size_t>(node)];
    if (node == dst) {
      if (path_out) {
        Path p;
        for (NodeId at = dst; at != src;) {
          const ChannelId c = labels[static_cast<std::size_t>(at)].pred;
          p.channels.push_back(c);
          p.nodes.push_back(at);
          at = topo.channel_from(c);
        }
        p.nodes.push_back(src);
        std::reverse(p.nodes.begin(), p.nodes.end());
        std::reverse(p.channels.begin(), p.channels.end());
        *path_out = std::move(p);
      }
      return here.label;
    }
    for (const Neighbor& nb : topo.neighbors(node)) {
      const ChannelId c = topo.channel(nb.edge, node);
      NodeLabel& next = labels[static_cast<std::size_t>(nb.node)];
      if (!use[static_cast<std::size_t>(c)] || next.visited) continue;
      const double w = weight[static_cast<std::size_t>(c)];
      next.visited = true;
      next.pred = c;
      next.label.hops = here.label.hops + 1;
      next.label.bottleneck = std::max(here.label.bottleneck, w);
      next.label.sum = here.label.sum + w;
      queue.push_back(nb.node);
    }
  }
  return std::nullopt;
}

std::optional<BfsLabel> bfs_test(const Topology& topo, const AllocationGrid& grid,
                                 const Request& request) {
  const std::vector<double> w = deadline_weights(grid, request.deadline);
  const std::vector<char> use(w.size(), 1);
  return bfs_test(topo, w, use, request.src, request.dst);
}

std::optional<Path> select_path(const Topology& topo, const AllocationGrid& grid,
                                const Request& request) {
  const std::vector<double> weight = deadline_weights(grid, request.deadline);
  std::vector<char> use(weight.size(), 1);

  std::vector<ChannelId> order(weight.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](ChannelId a, ChannelId b) {
    return weight[static_cast<std::size_t>(a)] > weight[static_cast<std::size_t>(b)];
  });
  auto w = [&](std::size_t k) { return weight[static_cast<std::size_t>(order[k])]; };
  auto disable = [&](std::size_t k) { use[static_cast<std::size_t>(order[k])] = 0; };

  auto best = bfs_test(topo, weight, use, request.src, request.dst);
  if (!best) return std::nullopt;
  std::size_t i = 0;
  std::size_t j = 1;
  bool flag = true;
  const std::size_t n = order.size();
  while (true) {
    if (best->bottleneck > kEps && flag) {
      flag = false;
      // Channels carrying more than the current bottleneck cannot improve on
      // the best candidate; equal loads stay enabled.
      while (i < n && w(i) > best->bottleneck + kEps) disable(i++);
    }
    if (i >= n) break;
    disable(i++);
    const auto next = bfs_test(topo, weight, use, request.src, request.dst);
    if (!next) break;
    const double alpha = best->hops * request.volume + best->sum;
    const double beta = next->hops * request.volume + next->sum;
    if (alpha > beta + kEps ||
        (std::abs(alpha - beta) <= kEps && best->bottleneck > next->bottleneck + kEps)) {
      j = i + 1;
      best = next;
      flag = true;
    }
  }
  while (i >= j) {
    --i;
    use[static_cast<std::size_t>(order[i])] = 1;
  }
  Path path;
  if (!bfs_test(topo, weight, use, request.src, request.dst, &path)) {
    throw std::logic_error("select_path: winning path vanished after restoring channels");
  }
  return path;
}

bool path_allocate(AllocationGrid& grid, const Path& path, const Request& request, bool apply) {
  if (request.deadline > grid.end()) {
    throw std::logic_error("path_allocate: window does not cover the deadline");
  }
  const Slot first = grid.now() + 2;
  std::vector<std::pair<Slot, double>> plan;
  double remaining = request.volume;
  for (Slot t = request.deadline; t >= first && remaining > kEps; --t) {
    const double space = std::min(remaining, grid.path_free(path.channels, t));
    if (space > kEps) {
      plan.emplace_back(t, space);
      remaining -= space;
    }
  }
  const bool fits = remaining <= kEps;
  if (fits && apply) {
    for (auto [t, space] : plan) grid.add_path_share(path.channels, t, request.id, space);
  }
  return fits;
}

DcRouteScheduler::DcRouteScheduler(const Topology& topo, Slot start)
    : topo_(&topo), grid_(topo.channel_capacities(), start) {}

bool DcRouteScheduler::allocate(Request& request) {
  reject_reason_.clear();
  if (request.arrival > now()) {
    throw std::logic_error("allocate: request " + std::to_string(request.id) +
                           " arrives in the future");
  }
  auto reject = [&](std::string why) {
    reject_reason_ = std::move(why);
    request.state = RequestState::kRejected;
    return false;
  };
  if (request.src < 0 || request.dst < 0 || request.src >= topo_->node_count() ||
      request.dst >= topo_->node_count()) {
    return reject("endpoint outside the topology");
  }
  if (request.src == request.dst) return reject("source equals destination");
  if (!(request.volume > kEps) || !std::isfinite(request.volume)) {
    return reject("non-positive volume");
  }
  if (request.deadline <= now() + 1) return reject("deadline leaves no schedulable slot");
  if (active_.count(request.id)) {
    throw std::logic_error("allocate: request id " + std::to_string(request.id) + " reused");
  }

  const Slot old_end = grid_.end();
  grid_.extend_window(request.deadline);
  const auto path = select_path(*topo_, grid_, request);
  if (!path) {
    grid_.shrink_window(old_end);
    return reject("no path");
  }
  if (!path_allocate(grid_, *path, request, false)) {
    grid_.shrink_window(old_end);
    return reject("insufficient capacity on the selected path");
  }
  path_allocate(grid_, *path, request, true);
  request.state = RequestState::kAdmitted;
  request.residual = request.volume;
  request.path = *path;
  active_.emplace(request.id, request);
  return true;
}

ChannelId DcRouteScheduler::anchor(const Request& r) const {
  return *std::min_element(r.path.channels.begin(), r.path.channels.end());
}

double DcRouteScheduler::pull_back() {
  double total = 0.0;
  const Slot next = now() + 1;
  std::vector<Share> visit;
  for (Slot t = next + 1; t <= end(); ++t) {
    for (ChannelId c = 0; c < grid_.channel_count(); ++c) {
      const auto list = grid_.shares(c, t);
      visit.assign(list.begin(), list.end());
      for (const Share& s : visit) {
        const Request& r = active_.at(s.flow);
        // A request's shares are identical on every channel of its path, so
        // it is handled once, at its lowest channel.
        if (anchor(r) != c) continue;
        const double vol = std::min(s.volume, grid_.path_free(r.path.channels, next));
        if (vol > kEps) total += grid_.move_share(r.path.channels, t, next, s.flow, vol);
      }
    }
  }
  return total;
}

double DcRouteScheduler::push_forward() {
  double total = 0.0;
  std::vector<Share> visit;
  last_push_passes_ = 0;
  while (true) {
    double pass = 0.0;
    ++last_push_passes_;
    for (Slot t = now() + 2; t <= end(); ++t) {
      for (ChannelId c = 0; c < grid_.channel_count(); ++c) {
        const auto list = grid_.shares(c, t);
        visit.assign(list.begin(), list.end());
        for (const Share& s : visit) {
          const Request& r = active_.at(s.flow);
          if (anchor(r) != c) continue;
          double vol = s.volume;
          for (Slot t2 = r.deadline; t2 > t && vol > kEps; --t2) {
            const double room = std::min(vol, grid_.path_free(r.path.channels, t2));
            if (room > kEps) {
              const double moved = grid_.move_share(r.path.channels, t, t2, s.flow, room);
              vol -= moved;
              pass += moved;
            }
          }
        }
      }
    }
    total += pass;
    if (pass == 0.0) break;
    if (last_push_passes_ >= kMaxPushPasses) {
      std::cerr << "warning: push_forward stopped after " << last_push_passes_ << " passes\n";
      break;
    }
  }
  return total;
}

SlotSchedule DcRouteScheduler::walk() {
  const Shipment shipped = grid_.advance();
  SlotSchedule schedule;
  schedule.slot = shipped.slot;
  for (const Share& s : shipped.flows) {
    Request& r = active_.at(s.flow);
    schedule.rows.push_back({r.id, s.volume, r.path.nodes});
    r.residual -= s.volume;
  }
  for (auto it = active_.begin(); it != active_.end();) {
    Request& r = it->second;
    if (r.residual <= kEps) {
      grid_.remove_flow(r.path.channels, r.id);
      r.residual = 0.0;
      r.state = RequestState::kCompleted;
      completed_.push_back(r);
      it = active_.erase(it);
      continue;
    }
    if (r.deadline <= now()) {
      throw InvariantViolation("request " + std::to_string(r.id) + " missed deadline " +
                               std::to_string(r.deadline) + " with " +
                               std::to_string(r.residual) + " left");
    }
    ++it;
  }
  return schedule;
}

std::optional<std::string> DcRouteScheduler::alap_violation() const {
  std::vector<double> profile;
  for (const auto& [id, r] : active_) {
    grid_.path_free_profile(r.path.channels, profile);
    const ChannelId a = anchor(r);
    // latest[t] = max path_free over (t, dl], swept from the deadline down.
    double later = 0.0;
    for (Slot t = std::min(r.deadline, end()); t >= now() + 2; --t) {
      if (grid_.share(a, t, id) > kEps && later > kEps) {
        return "request " + std::to_string(id) + " at slot " + std::to_string(t) +
               " could move later (free " + std::to_string(later) + ")";
      }
      later = std::max(later, profile[static_cast<std::size_t>(t - now() - 1)]);
    }
  }
  return std::nullopt;
}

std::optional<std::string> DcRouteScheduler::pullback_violation() const {
  const Slot next = now() + 1;
  for (const auto& [id, r] : active_) {
    const ChannelId a = anchor(r);
    bool future = false;
    for (Slot t = next + 1; t <= std::min(r.deadline, end()) && !future; ++t) {
      future = grid_.share(a, t, id) > kEps;
    }
    if (!future) continue;
    const double room = grid_.path_free(r.path.channels, next);
    if (room > kEps) {
      return "request " + std::to_string(id) + " could pull " + std::to_string(room) +
             " into slot " + std::to_string(next);
    }
  }
  return std::nullopt;
}

void DcRouteScheduler::check_invariants(bool pulled) const {
  grid_.check_invariants();
  for (ChannelId c = 0; c < grid_.channel_count(); ++c) {
    for (Slot t = now() + 1; t <= end(); ++t) {
      for (const Share& s : grid_.shares(c, t)) {
        const auto it = active_.find(s.flow);
        if (it == active_.end()) {
          throw InvariantViolation("share of inactive request " + std::to_string(s.flow));
        }
        const Request& r = it->second;
        const auto& chans = r.path.channels;
        if (std::find(chans.begin(), chans.end(), c) == chans.end()) {
          throw InvariantViolation("request " + std::to_string(s.flow) + " has a share off its path");
        }
        if (t > r.deadline) {
          throw InvariantViolation("request " + std::to_string(s.flow) +
                                   " scheduled after its deadline");
        }
      }
    }
  }
  for (const auto& [id, r] : active_) {
    double along = -1.0;
    for (ChannelId c : r.path.channels) {
      double sum = 0.0;
      for (Slot t = now() + 1; t <= std::min(r.deadline, end()); ++t) sum += grid_.share(c, t, id);
      if (along >= 0.0 && std::abs(sum - along) > 1e-8) {
        throw InvariantViolation("request " + std::to_string(id) + " differs between path channels");
      }
      along = sum;
    }
    if (std::abs(along - r.residual) > 1e-8) {
      throw InvariantViolation("request " + std::to_string(id) + " holds " +
                               std::to_string(along) + " but owes " + std::to_string(r.residual));
    }
  }
  if (auto why = alap_violation()) throw InvariantViolation("not ALAP: " + *why);
  if (pulled) {
    if (auto why = pullback_violation()) throw InvariantViolation("pull-back incomplete: " + *why);
  }
}

}  // namespace dcroute
