#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dcroute/common.hpp"

namespace dcroute {

struct Edge {
  NodeId u = 0;  // u < v after construction
  NodeId v = 0;
  double capacity = 1.0;
};

struct Neighbor {
  NodeId node;
  EdgeId edge;
};

// Undirected datacenter graph. Every edge exposes two independent directed
// capacity channels. Immutable once built.
class Topology {
 public:
  Topology() = default;
  // Throws std::invalid_argument on self-loops, duplicates, dangling ids or
  // non-positive capacities.
  Topology(int node_count, std::vector<Edge> edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int channel_count() const { return 2 * edge_count(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  // Sorted by ascending neighbor id.
  std::span<const Neighbor> neighbors(NodeId n) const {
    return adjacency_[static_cast<std::size_t>(n)];
  }

  ChannelId channel(EdgeId e, NodeId from) const {
    return 2 * e + (from == edges_[static_cast<std::size_t>(e)].u ? 0 : 1);
  }
  EdgeId channel_edge(ChannelId c) const { return c / 2; }
  NodeId channel_from(ChannelId c) const {
    const Edge& e = edges_[static_cast<std::size_t>(c / 2)];
    return c % 2 == 0 ? e.u : e.v;
  }
  NodeId channel_to(ChannelId c) const {
    const Edge& e = edges_[static_cast<std::size_t>(c / 2)];
    return c % 2 == 0 ? e.v : e.u;
  }
  double channel_capacity(ChannelId c) const { return edges_[static_cast<std::size_t>(c / 2)].capacity; }
  std::vector<double> channel_capacities() const;
  // Channel from a to b, or -1 when a and b are not adjacent.
  ChannelId find_channel(NodeId a, NodeId b) const;

  bool connected() const;
  // Same graph with every capacity multiplied by `factor`.
  Topology scaled(double factor) const;

 private:
  int node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

// Topology file: first non-comment line is the node count, then one
// "u v capacity" line per edge. '#' starts a comment. Warns on stderr when
// the graph is disconnected.
Topology parse_topology(std::istream& in);
Topology load_topology(const std::filesystem::path& path);
void write_topology(std::ostream& out, const Topology& topo, const std::string& comment = {});

// Approximation of the 12-site / 19-link GScale WAN. The published figure
// does not list adjacency; this layout keeps site count, link count and a
// two-continent ring-with-chords structure.
Topology gscale_topology();

// Ring of n nodes plus n-3 chords between nodes two hops apart on the ring,
// so M = 2n - 3 and every node links only to nodes at most 2 ring hops away.
// Chord selection and node labels are drawn from `seed`. Requires n >= 3.
Topology generate_synthetic(int n, std::uint64_t seed);

}  // namespace dcroute
