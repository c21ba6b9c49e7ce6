#include "dcroute/paths.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dcroute {

bool Path::simple() const {
  std::vector<NodeId> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::strong_ordering Path::operator<=>(const Path& other) const {
  if (auto c = hops() <=> other.hops(); c != 0) return c;
  return std::lexicographical_compare_three_way(nodes.begin(), nodes.end(), other.nodes.begin(),
                                                other.nodes.end());
}

Path path_from_nodes(const Topology& topo, std::span<const NodeId> nodes) {
  Path path;
  path.nodes.assign(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const ChannelId c = topo.find_channel(nodes[i], nodes[i + 1]);
    if (c < 0) {
      throw std::invalid_argument("nodes " + std::to_string(nodes[i]) + " and " +
                                  std::to_string(nodes[i + 1]) + " are not adjacent");
    }
    path.channels.push_back(c);
  }
  return path;
}

std::string format_path(const Path& path, char separator) {
  std::ostringstream out;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    if (i) out << separator;
    out << path.nodes[i];
  }
  return out.str();
}

namespace {

// BFS with blocked nodes and channels. Ascending neighbor order makes the
// first-discovery tree hold the lexicographically smallest shortest paths.
std::optional<Path> bfs_path(const Topology& topo, NodeId src, NodeId dst,
                             std::span<const char> usable_channel,
                             std::span<const char> blocked_node) {
  const auto n = static_cast<std::size_t>(topo.node_count());
  std::vector<ChannelId> pred(n, -1);
  std::vector<char> seen(n, 0);
  std::deque<NodeId> queue{src};
  seen[static_cast<std::size_t>(src)] = 1;
  while (!queue.empty()) {
    const NodeId node = queue.front();
    queue.pop_front();
    if (node == dst) break;
    for (const Neighbor& nb : topo.neighbors(node)) {
      const auto next = static_cast<std::size_t>(nb.node);
      if (seen[next]) continue;
      if (!blocked_node.empty() && blocked_node[next]) continue;
      const ChannelId c = topo.channel(nb.edge, node);
      if (!usable_channel.empty() && !usable_channel[static_cast<std::size_t>(c)]) continue;
      seen[next] = 1;
      pred[next] = c;
      queue.push_back(nb.node);
    }
  }
  if (!seen[static_cast<std::size_t>(dst)]) return std::nullopt;
  Path path;
  for (NodeId at = dst; at != src;) {
    const ChannelId c = pred[static_cast<std::size_t>(at)];
    path.channels.push_back(c);
    path.nodes.push_back(at);
    at = topo.channel_from(c);
  }
  path.nodes.push_back(src);
  std::reverse(path.nodes.begin(), path.nodes.end());
  std::reverse(path.channels.begin(), path.channels.end());
  return path;
}

void check_endpoints(const Topology& topo, NodeId src, NodeId dst) {
  if (src < 0 || dst < 0 || src >= topo.node_count() || dst >= topo.node_count()) {
    throw std::invalid_argument("path endpoint outside the topology");
  }
  if (src == dst) throw std::invalid_argument("path source equals destination");
}

}  // namespace

std::optional<Path> shortest_path(const Topology& topo, NodeId src, NodeId dst,
                                  std::span<const char> usable) {
  check_endpoints(topo, src, dst);
  return bfs_path(topo, src, dst, usable, {});
}

std::vector<Path> k_shortest_paths(const Topology& topo, NodeId src, NodeId dst, int k) {
  check_endpoints(topo, src, dst);
  if (k < 1) throw std::invalid_argument("k must be positive");
  std::vector<Path> accepted;
  auto first = bfs_path(topo, src, dst, {}, {});
  if (!first) return accepted;
  accepted.push_back(std::move(*first));

  std::set<Path> candidates;
  const auto channels = static_cast<std::size_t>(topo.channel_count());
  const auto nodes = static_cast<std::size_t>(topo.node_count());
  while (static_cast<int>(accepted.size()) < k) {
    const Path& last = accepted.back();
    for (std::size_t i = 0; i + 1 < last.nodes.size(); ++i) {
      const NodeId spur = last.nodes[i];
      std::vector<char> usable(channels, 1);
      std::vector<char> blocked(nodes, 0);
      for (const Path& p : accepted) {
        if (p.nodes.size() > i + 1 &&
            std::equal(last.nodes.begin(), last.nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                       p.nodes.begin())) {
          usable[static_cast<std::size_t>(p.channels[i])] = 0;
        }
      }
      for (std::size_t j = 0; j < i; ++j) blocked[static_cast<std::size_t>(last.nodes[j])] = 1;
      auto tail = bfs_path(topo, spur, dst, usable, blocked);
      if (!tail) continue;
      Path full;
      full.nodes.assign(last.nodes.begin(), last.nodes.begin() + static_cast<std::ptrdiff_t>(i));
      full.channels.assign(last.channels.begin(),
                           last.channels.begin() + static_cast<std::ptrdiff_t>(i));
      full.nodes.insert(full.nodes.end(), tail->nodes.begin(), tail->nodes.end());
      full.channels.insert(full.channels.end(), tail->channels.begin(), tail->channels.end());
      if (std::find(accepted.begin(), accepted.end(), full) == accepted.end()) {
        candidates.insert(std::move(full));
      }
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

std::vector<Path> enumerate_simple_paths(const Topology& topo, NodeId src, NodeId dst,
                                         std::size_t limit) {
  check_endpoints(topo, src, dst);
  std::vector<Path> out;
  std::vector<char> on_path(static_cast<std::size_t>(topo.node_count()), 0);
  Path current;
  current.nodes.push_back(src);
  on_path[static_cast<std::size_t>(src)] = 1;

  auto dfs = [&](auto&& self, NodeId node) -> void {
    if (node == dst) {
      if (out.size() >= limit) throw std::length_error("too many simple paths");
      out.push_back(current);
      return;
    }
    for (const Neighbor& nb : topo.neighbors(node)) {
      if (on_path[static_cast<std::size_t>(nb.node)]) continue;
      on_path[static_cast<std::size_t>(nb.node)] = 1;
      current.nodes.push_back(nb.node);
      current.channels.push_back(topo.channel(nb.edge, node));
      self(self, nb.node);
      current.nodes.pop_back();
      current.channels.pop_back();
      on_path[static_cast<std::size_t>(nb.node)] = 0;
    }
  };
  dfs(dfs, src);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dcroute
