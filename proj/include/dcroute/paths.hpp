#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dcroute/topology.hpp"

namespace dcroute {

// Simple directed path, stored both as a node sequence and as the channels
// traversed.
struct Path {
  std::vector<NodeId> nodes;
  std::vector<ChannelId> channels;

  int hops() const { return static_cast<int>(channels.size()); }
  bool empty() const { return channels.empty(); }
  NodeId source() const { return nodes.front(); }
  NodeId destination() const { return nodes.back(); }
  bool simple() const;

  bool operator==(const Path& other) const { return nodes == other.nodes; }
  // Ranking used everywhere paths are ordered: hop count, then node sequence.
  std::strong_ordering operator<=>(const Path& other) const;
};

Path path_from_nodes(const Topology& topo, std::span<const NodeId> nodes);
std::string format_path(const Path& path, char separator = '-');

// Lexicographically smallest minimum-hop path using only channels for which
// `usable` is true (all channels when empty). Neighbors are visited in
// ascending id order.
std::optional<Path> shortest_path(const Topology& topo, NodeId src, NodeId dst,
                                  std::span<const char> usable = {});

// Loopless K shortest paths by hop count (deviation/Yen style), ordered by
// (hops, node sequence). Returns fewer than k when fewer simple paths exist
// and an empty list for a disconnected pair. Throws on src == dst or k < 1.
std::vector<Path> k_shortest_paths(const Topology& topo, NodeId src, NodeId dst, int k);

// Every simple path from src to dst, ordered like k_shortest_paths.
// Throws std::length_error once more than `limit` paths are found.
std::vector<Path> enumerate_simple_paths(const Topology& topo, NodeId src, NodeId dst,
                                         std::size_t limit = 100000);

}  // namespace dcroute
