#include "dcroute/topology.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

namespace dcroute {

Topology::Topology(int node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ < 1) throw std::invalid_argument("topology needs at least one node");
  std::set<std::pair<NodeId, NodeId>> seen;
  for (Edge& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= node_count_ || e.v >= node_count_) {
      throw std::invalid_argument("edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
                                  " references a node outside 0.." +
                                  std::to_string(node_count_ - 1));
    }
    if (e.u == e.v) {
      throw std::invalid_argument("self-loop on node " + std::to_string(e.u));
    }
    if (!(e.capacity > 0.0)) {
      throw std::invalid_argument("edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
                                  " has non-positive capacity");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!seen.emplace(e.u, e.v).second) {
      throw std::invalid_argument("duplicate edge " + std::to_string(e.u) + "-" +
                                  std::to_string(e.v));
    }
  }
  adjacency_.assign(static_cast<std::size_t>(node_count_), {});
  for (EdgeId i = 0; i < edge_count(); ++i) {
    const Edge& e = edges_[static_cast<std::size_t>(i)];
    adjacency_[static_cast<std::size_t>(e.u)].push_back({e.v, i});
    adjacency_[static_cast<std::size_t>(e.v)].push_back({e.u, i});
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

std::vector<double> Topology::channel_capacities() const {
  std::vector<double> caps(static_cast<std::size_t>(channel_count()));
  for (ChannelId c = 0; c < channel_count(); ++c) caps[static_cast<std::size_t>(c)] = channel_capacity(c);
  return caps;
}

ChannelId Topology::find_channel(NodeId a, NodeId b) const {
  if (a < 0 || a >= node_count_) return -1;
  for (const Neighbor& n : adjacency_[static_cast<std::size_t>(a)]) {
    if (n.node == b) return channel(n.edge, a);
  }
  return -1;
}

bool Topology::connected() const {
  if (node_count_ == 0) return true;
  std::vector<char> seen(static_cast<std::size_t>(node_count_), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : neighbors(n)) {
      if (!seen[static_cast<std::size_t>(nb.node)]) {
        seen[static_cast<std::size_t>(nb.node)] = 1;
        ++reached;
        stack.push_back(nb.node);
      }
    }
  }
  return reached == node_count_;
}

Topology Topology::scaled(double factor) const {
  std::vector<Edge> edges = edges_;
  for (Edge& e : edges) e.capacity *= factor;
  return Topology(node_count_, std::move(edges));
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Topology parse_topology(std::istream& in) {
  std::string raw;
  int line_no = 0;
  int node_count = -1;
  std::vector<Edge> edges;
  std::vector<int> edge_lines;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    if (blank(line)) continue;
    std::istringstream fields(line);
    if (node_count < 0) {
      long long n = 0;
      std::string extra;
      if (!(fields >> n) || (fields >> extra)) {
        throw ParseError("expected node count", line_no);
      }
      if (n < 1) throw ParseError("node count must be positive", line_no);
      node_count = static_cast<int>(n);
      continue;
    }
    long long u = 0, v = 0;
    double cap = 0.0;
    std::string extra;
    if (!(fields >> u >> v >> cap) || (fields >> extra)) {
      throw ParseError("expected \"u v capacity\"", line_no);
    }
    if (u < 0 || v < 0 || u >= node_count || v >= node_count) {
      throw ParseError("dangling node id in edge " + std::to_string(u) + " " + std::to_string(v),
                       line_no);
    }
    if (u == v) throw ParseError("self-loop on node " + std::to_string(u), line_no);
    if (!(cap > 0.0)) throw ParseError("non-positive capacity", line_no);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const Edge& e = edges[i];
      if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) {
        throw ParseError("duplicate edge " + std::to_string(u) + " " + std::to_string(v) +
                             " (first on line " + std::to_string(edge_lines[i]) + ")",
                         line_no);
      }
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), cap});
    edge_lines.push_back(line_no);
  }
  if (node_count < 0) throw ParseError("missing node count", line_no);
  Topology topo(node_count, std::move(edges));
  if (!topo.connected()) {
    std::cerr << "warning: topology is not connected\n";
  }
  return topo;
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file " + path.string());
  try {
    return parse_topology(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void write_topology(std::ostream& out, const Topology& topo, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << "\n";
  out << topo.node_count() << "\n";
  for (const Edge& e : topo.edges()) {
    std::ostringstream cap;
    cap.precision(17);
    cap << e.capacity;
    out << e.u << " " << e.v << " " << cap.str() << "\n";
  }
}

Topology gscale_topology() {
  // Sites 0-3 west coast, 4-6 central/east, 7-9 Europe, 10-11 Asia.
  static constexpr std::pair<NodeId, NodeId> kLinks[] = {
      {0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}, {5, 6}, {4, 7},
      {6, 7}, {6, 8}, {7, 8}, {8, 9}, {7, 10}, {9, 10}, {9, 11}, {10, 11}, {0, 11},
  };
  std::vector<Edge> edges;
  for (auto [u, v] : kLinks) edges.push_back({u, v, 1.0});
  return Topology(12, std::move(edges));
}

Topology generate_synthetic(int n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("synthetic topology needs n >= 3");
  std::mt19937_64 rng(seed);
  auto below = [&rng](std::uint64_t bound) {
    // Rejection sampling keeps this independent of the standard library's
    // distribution implementations.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = rng();
    } while (x >= limit);
    return x % bound;
  };

  std::set<std::pair<int, int>> ring;
  for (int i = 0; i < n; ++i) ring.emplace(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
  std::vector<std::pair<int, int>> chords;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 2) % n;
    const std::pair<int, int> c{std::min(i, j), std::max(i, j)};
    if (c.first == c.second || ring.count(c)) continue;
    if (std::find(chords.begin(), chords.end(), c) == chords.end()) chords.push_back(c);
  }
  const std::size_t keep = static_cast<std::size_t>(n - 3);

  auto degree2_count = [&](const std::vector<std::size_t>& order) {
    std::vector<int> deg(static_cast<std::size_t>(n), 2);
    for (std::size_t k = 0; k < keep; ++k) {
      ++deg[static_cast<std::size_t>(chords[order[k]].first)];
      ++deg[static_cast<std::size_t>(chords[order[k]].second)];
    }
    return std::count(deg.begin(), deg.end(), 2);
  };

  std::vector<std::size_t> order(chords.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> best;
  long best_score = -1;
  // Prefer chord subsets that leave every node with degree >= 3; n = 5
  // cannot satisfy that with 7 links, so keep the best attempt.
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[below(i)]);
    const long score = static_cast<long>(degree2_count(order));
    if (best_score < 0 || score < best_score) {
      best_score = score;
      best = order;
    }
    if (score == 0) break;
  }

  std::vector<NodeId> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  for (std::size_t i = label.size(); i > 1; --i) std::swap(label[i - 1], label[below(i)]);

  std::vector<Edge> edges;
  for (const auto& [a, b] : ring) {
    edges.push_back({label[static_cast<std::size_t>(a)], label[static_cast<std::size_t>(b)], 1.0});
  }
  std::vector<std::size_t> kept(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(kept.begin(), kept.end());
  for (std::size_t k : kept) {
    edges.push_back({label[static_cast<std::size_t>(chords[k].first)],
                     label[static_cast<std::size_t>(chords[k].second)], 1.0});
  }
  for (Edge& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return Topology(n, std::move(edges));
}

}  // namespace dcroute
