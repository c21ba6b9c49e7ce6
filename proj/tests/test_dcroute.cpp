#include <gtest/gtest.h>

#include <algorithm>
#include <queue>
#include <random>
#include <sstream>

#include "dcroute/dcroute.hpp"

namespace dcroute {
namespace {

Topology parse(const std::string& text) {
  std::istringstream in(text);
  return parse_topology(in);
}

Request make_request(RequestId id, NodeId src, NodeId dst, double vol, Slot dl, Slot arrival = 0) {
  Request r;
  r.id = id;
  r.src = src;
  r.dst = dst;
  r.volume = vol;
  r.deadline = dl;
  r.arrival = arrival;
  return r;
}

// --- independent reference for the path search -------------------------

struct RefLabel {
  int r = -1;
  double rv = -1;
  double rs = -1;
  std::vector<NodeId> nodes;
};

RefLabel ref_bfs(const Topology& topo, const std::vector<double>& load,
                 const std::vector<bool>& use, NodeId src, NodeId dst) {
  const int n = topo.node_count();
  std::vector<bool> seen(n, false);
  std::vector<int> r(n, 0);
  std::vector<double> rv(n, 0.0), rs(n, 0.0);
  std::vector<NodeId> parent(n, -1);
  std::queue<NodeId> q;
  q.push(src);
  seen[src] = true;
  while (!q.empty()) {
    const NodeId node = q.front();
    q.pop();
    if (node == dst) {
      RefLabel out{r[node], rv[node], rs[node], {}};
      for (NodeId at = dst; at != -1; at = parent[at]) out.nodes.insert(out.nodes.begin(), at);
      return out;
    }
    std::vector<NodeId> next;
    for (const Neighbor& nb : topo.neighbors(node)) next.push_back(nb.node);
    std::sort(next.begin(), next.end());
    for (NodeId m : next) {
      const ChannelId e = topo.find_channel(node, m);
      if (use[e] && !seen[m]) {
        q.push(m);
        seen[m] = true;
        parent[m] = node;
        r[m] = r[node] + 1;
        rv[m] = std::max(rv[node], load[e]);
        rs[m] = rs[node] + load[e];
      }
    }
  }
  return {};
}

// Literal transcription of the pruning loop over directed channels.
std::vector<NodeId> ref_select(const Topology& topo, const std::vector<double>& load, NodeId src,
                               NodeId dst, double vol) {
  const int m = topo.channel_count();
  std::vector<bool> use(m, true);
  std::vector<int> se(m);
  for (int k = 0; k < m; ++k) se[k] = k;
  std::stable_sort(se.begin(), se.end(), [&](int a, int b) { return load[a] > load[b]; });
  int i = 0, j = 1;
  bool flag = true;
  RefLabel rb = ref_bfs(topo, load, use, src, dst);
  if (rb.r == -1) return {};
  while (rb.r != -1) {
    if (rb.rv > 1e-9 && flag) {
      flag = false;
      while (i < m && load[se[i]] > rb.rv + 1e-9) {
        use[se[i]] = false;
        ++i;
      }
    }
    if (i >= m) break;
    use[se[i]] = false;
    ++i;
    RefLabel rn = ref_bfs(topo, load, use, src, dst);
    if (rn.r == -1) break;
    const double alpha = rb.r * vol + rb.rs;
    const double beta = rn.r * vol + rn.rs;
    if (alpha > beta + 1e-9 || (std::abs(alpha - beta) <= 1e-9 && rb.rv > rn.rv + 1e-9)) {
      j = i + 1;
      rb = rn;
      flag = true;
    }
  }
  while (i >= j) {
    --i;
    use[se[i]] = true;
  }
  return ref_bfs(topo, load, use, src, dst).nodes;
}

// --- path search ----------------------------------------------------------

TEST(BfsTest, EmptyGridLine) {
  const Topology t = parse("3\n0 1 1\n1 2 1\n");
  AllocationGrid g(t.channel_capacities(), 0);
  g.extend_window(5);
  const auto label = bfs_test(t, g, make_request(1, 0, 2, 1.0, 5));
  ASSERT_TRUE(label);
  EXPECT_EQ(label->hops, 2);
  EXPECT_EQ(label->bottleneck, 0.0);
  EXPECT_EQ(label->sum, 0.0);
}

TEST(BfsTest, UnreachableWhenAllDisabled) {
  const Topology t = parse("3\n0 1 1\n1 2 1\n");
  const std::vector<double> w(4, 0.0);
  const std::vector<char> use(4, 0);
  EXPECT_FALSE(bfs_test(t, w, use, 0, 2));
}

TEST(BfsTest, LabelsAccumulateAlongTree) {
  const Topology t = parse("3\n0 1 1\n1 2 1\n");
  std::vector<double> w(4, 0.0);
  w[t.find_channel(0, 1)] = 0.5;
  w[t.find_channel(1, 2)] = 0.25;
  w[t.find_channel(2, 1)] = 9.0;  // opposite direction is a separate channel
  const std::vector<char> use(4, 1);
  Path p;
  const auto label = bfs_test(t, w, use, 0, 2, &p);
  ASSERT_TRUE(label);
  EXPECT_EQ(label->hops, 2);
  EXPECT_DOUBLE_EQ(label->bottleneck, 0.5);
  EXPECT_DOUBLE_EQ(label->sum, 0.75);
  EXPECT_EQ(p.nodes, (std::vector<NodeId>{0, 1, 2}));
}

// Diamond a=0, b=1, c=2, d=3; the a-b-d branch carries 0.5 on both links.
TEST(SelectPath, DiamondAvoidsLoadedBranch) {
  const Topology t = parse("4\n0 1 1\n0 2 1\n1 3 1\n2 3 1\n");
  AllocationGrid g(t.channel_capacities(), 0);
  g.extend_window(6);
  const Path loaded = path_from_nodes(t, std::vector<NodeId>{0, 1, 3});
  g.add_path_share(loaded.channels, 4, 99, 0.5);
  const Request r = make_request(1, 0, 3, 1.0, 6);
  const auto chosen = select_path(t, g, r);
  ASSERT_TRUE(chosen);
  EXPECT_EQ(chosen->nodes, (std::vector<NodeId>{0, 2, 3}));

  // Exhaustive scoring: alpha = hops * vol + sum of S(dl, e).
  double best = 1e300;
  std::vector<NodeId> best_nodes;
  for (const Path& p : enumerate_simple_paths(t, 0, 3)) {
    double alpha = p.hops() * r.volume;
    for (ChannelId c : p.channels) alpha += g.prefix(c, r.deadline);
    if (alpha < best) {
      best = alpha;
      best_nodes = p.nodes;
    }
  }
  EXPECT_EQ(best_nodes, chosen->nodes);
}

TEST(SelectPath, UniquePathRegardlessOfLoad) {
  const Topology t = parse("3\n0 1 1\n1 2 1\n");
  AllocationGrid g(t.channel_capacities(), 0);
  g.extend_window(4);
  g.add_path_share(path_from_nodes(t, std::vector<NodeId>{0, 1, 2}).channels, 3, 5, 0.9);
  const auto chosen = select_path(t, g, make_request(1, 0, 2, 0.5, 4));
  ASSERT_TRUE(chosen);
  EXPECT_EQ(chosen->nodes, (std::vector<NodeId>{0, 1, 2}));
}

TEST(SelectPath, DisconnectedPairHasNoPath) {
  const Topology t = parse("4\n0 1 1\n2 3 1\n");
  AllocationGrid g(t.channel_capacities(), 0);
  g.extend_window(4);
  EXPECT_FALSE(select_path(t, g, make_request(1, 0, 3, 0.5, 4)));
}

TEST(SelectPath, MatchesReferenceReplayOnRandomLoads) {
  const Topology t = generate_synthetic(5, 11);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int pattern = 0; pattern < 50; ++pattern) {
    AllocationGrid g(t.channel_capacities(), 0);
    g.extend_window(8);
    for (ChannelId c = 0; c < t.channel_count(); ++c) {
      for (Slot s = 1; s <= 8; ++s) {
        // Quantized loads create ties that exercise the tie-break rules.
        const double v = std::floor(unit(rng) * 4.0) / 4.0;
        if (v > 0) g.add_share(c, s, 1000 + c, v);
      }
    }
    std::vector<double> load(static_cast<std::size_t>(t.channel_count()));
    for (ChannelId c = 0; c < t.channel_count(); ++c) load[c] = g.prefix(c, 8);
    for (NodeId s = 0; s < t.node_count(); ++s) {
      for (NodeId d = 0; d < t.node_count(); ++d) {
        if (s == d) continue;
        const double vol = 0.5 + 3.0 * unit(rng);
        const auto got = select_path(t, g, make_request(1, s, d, vol, 8));
        ASSERT_TRUE(got);
        EXPECT_EQ(got->nodes, ref_select(t, load, s, d, vol))
            << "pattern " << pattern << " " << s << "->" << d;
        EXPECT_TRUE(got->simple());
      }
    }
  }
}

// --- ALAP back-fill -----------------------------------------------------------

TEST(PathAllocate, BackFillsFromDeadline) {
  const Topology t = parse("2\n0 1 1\n");
  AllocationGrid g(t.channel_capacities(), 0);
  g.extend_window(4);
  const Path p = path_from_nodes(t, std::vector<NodeId>{0, 1});
  const Request r = make_request(7, 0, 1, 2.5, 4);
  EXPECT_TRUE(path_allocate(g, p, r, false));
  EXPECT_EQ(g.dump(), "");
  EXPECT_TRUE(path_allocate(g, p, r, true));
  const ChannelId c = p.channels[0];
  EXPECT_DOUBLE_EQ(g.share(c, 4, 7), 1.0);
  EXPECT_DOUBLE_EQ(g.share(c, 3, 7), 1.0);
  EXPECT_DOUBLE_EQ(g.share(c, 2, 7), 0.5);
  EXPECT_EQ(g.share(c, 1, 7), 0.0);
}

TEST(PathAllocate, RejectsWithoutTouchingGrid) {
  const Topology t = parse("2\n0 1 1\n");
  AllocationGrid g(t.channel_capacities(), 0);
  g.extend_window(4);
  const Path p = path_from_nodes(t, std::vector<NodeId>{0, 1});
  EXPECT_FALSE(path_allocate(g, p, make_request(7, 0, 1, 4.0, 4), true));
  EXPECT_EQ(g.dump(), "");
}

TEST(PathAllocate, DryRunPredictsApply) {
  const Topology t = gscale_topology();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AllocationGrid g(t.channel_capacities(), 0);
  g.extend_window(12);
  for (int k = 0; k < 40; ++k) {
    const NodeId s = static_cast<NodeId>(rng() % 12);
    NodeId d = static_cast<NodeId>(rng() % 12);
    if (d == s) d = (d + 1) % 12;
    const Path p = k_shortest_paths(t, s, d, 1).front();
    const Request r = make_request(k, s, d, 3.0 * unit(rng), 2 + static_cast<Slot>(rng() % 10));
    const std::string before = g.dump();
    const bool dry = path_allocate(g, p, r, false);
    EXPECT_EQ(g.dump(), before);
    EXPECT_EQ(path_allocate(g, p, r, true), dry);
    if (!dry) EXPECT_EQ(g.dump(), before);
  }
  g.check_invariants();
}

// --- scheduler -----------------------------------------------------------------

TEST(Scheduler, FirstRequestLandsAtDeadline) {
  const Topology t = gscale_topology();
  DcRouteScheduler s(t);
  Request r = make_request(1, 0, 5, 1.5, 10);
  ASSERT_TRUE(s.allocate(r));
  EXPECT_EQ(r.state, RequestState::kAdmitted);
  const ChannelId c = r.path.channels.front();
  EXPECT_DOUBLE_EQ(s.grid().share(c, 10, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.grid().share(c, 9, 1), 0.5);
  for (Slot x = 1; x <= 8; ++x) EXPECT_EQ(s.grid().share(c, x, 1), 0.0);
  s.check_invariants(false);
}

TEST(Scheduler, RejectsInfeasibleAndBadRequests) {
  const Topology t = parse("3\n0 1 1\n1 2 1\n");
  DcRouteScheduler s(t);
  Request big = make_request(1, 0, 2, 3.5, 4);  // only slots 2..4 are usable
  EXPECT_FALSE(s.allocate(big));
  EXPECT_EQ(big.state, RequestState::kRejected);
  EXPECT_EQ(s.grid().dump(), "");
  EXPECT_EQ(s.end(), 1);

  Request loop = make_request(2, 1, 1, 1.0, 4);
  EXPECT_FALSE(s.allocate(loop));
  EXPECT_FALSE(s.last_reject_reason().empty());
  Request late = make_request(3, 0, 1, 0.1, 1);
  EXPECT_FALSE(s.allocate(late));
  Request empty = make_request(4, 0, 1, 0.0, 5);
  EXPECT_FALSE(s.allocate(empty));
  Request fits = make_request(5, 0, 2, 3.0, 4);
  EXPECT_TRUE(s.allocate(fits));
  EXPECT_TRUE(s.last_reject_reason().empty());
}

TEST(Scheduler, PullBackFillsNextSlot) {
  const Topology t = parse("2\n0 1 1\n");
  DcRouteScheduler s(t);
  Request r = make_request(1, 0, 1, 0.5, 6);
  ASSERT_TRUE(s.allocate(r));
  EXPECT_DOUBLE_EQ(s.pull_back(), 0.5);
  EXPECT_DOUBLE_EQ(s.grid().share(r.path.channels[0], 1, 1), 0.5);
  EXPECT_DOUBLE_EQ(s.push_forward(), 0.0);
  s.check_invariants(true);
  const SlotSchedule out = s.walk();
  ASSERT_EQ(out.rows.size(), 1u);
  EXPECT_EQ(out.slot, 1);
  EXPECT_DOUBLE_EQ(out.rows[0].rate, 0.5);
  EXPECT_TRUE(s.active().empty());
  ASSERT_EQ(s.completed().size(), 1u);
  EXPECT_EQ(s.completed()[0].state, RequestState::kCompleted);
}

TEST(Scheduler, PullBackSaturatedNextSlotMovesNothing) {
  const Topology t = parse("2\n0 1 1\n");
  DcRouteScheduler s(t);
  Request a = make_request(1, 0, 1, 1.0, 3);
  Request b = make_request(2, 0, 1, 1.0, 3);
  ASSERT_TRUE(s.allocate(a));
  ASSERT_TRUE(s.allocate(b));
  EXPECT_DOUBLE_EQ(s.pull_back(), 1.0);
  EXPECT_DOUBLE_EQ(s.pull_back(), 0.0);
}

// Line A-B-C with three requests sharing one deadline. Blue already owns
// A-B in the next slot, so green (A-C) cannot be pulled back and orange
// (B-C) is pulled instead; green is then pushed into the slot orange left.
TEST(Scheduler, PullBlockedThenPushForward) {
  const Topology t = parse("3\n0 1 1\n1 2 1\n");
  DcRouteScheduler s(t);
  Request blue = make_request(1, 0, 1, 1.0, 4);
  ASSERT_TRUE(s.allocate(blue));
  s.pull_back();
  Request orange = make_request(2, 1, 2, 1.0, 4);
  Request green = make_request(3, 0, 2, 1.0, 4);
  ASSERT_TRUE(s.allocate(orange));
  ASSERT_TRUE(s.allocate(green));
  const ChannelId ab = t.find_channel(0, 1);
  const ChannelId bc = t.find_channel(1, 2);
  EXPECT_DOUBLE_EQ(s.grid().share(ab, 3, 3), 1.0);
  EXPECT_DOUBLE_EQ(s.grid().share(bc, 4, 2), 1.0);

  EXPECT_DOUBLE_EQ(s.pull_back(), 1.0);
  EXPECT_DOUBLE_EQ(s.grid().share(bc, 1, 2), 1.0);
  EXPECT_DOUBLE_EQ(s.grid().share(ab, 3, 3), 1.0);
  EXPECT_TRUE(s.alap_violation().has_value());

  EXPECT_DOUBLE_EQ(s.push_forward(), 1.0);
  EXPECT_DOUBLE_EQ(s.grid().share(ab, 4, 3), 1.0);
  EXPECT_DOUBLE_EQ(s.grid().share(bc, 4, 3), 1.0);
  EXPECT_DOUBLE_EQ(s.grid().load(ab, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.grid().load(bc, 1), 1.0);
  s.check_invariants(true);
}

TEST(Scheduler, WalkOnEmptyNetworkAdvances) {
  const Topology t = gscale_topology();
  DcRouteScheduler s(t, 5);
  const SlotSchedule out = s.walk();
  EXPECT_TRUE(out.rows.empty());
  EXPECT_EQ(out.slot, 6);
  EXPECT_EQ(s.now(), 6);
}

// Brute-force check: no share at t >= t_now+2 may be delayed to any later
// slot up to its deadline.
bool delayable(const DcRouteScheduler& s) {
  const AllocationGrid& g = s.grid();
  for (const auto& [id, r] : s.active()) {
    for (Slot t = g.now() + 2; t < r.deadline; ++t) {
      if (g.share(r.path.channels[0], t, id) <= kEps) continue;
      for (Slot t2 = t + 1; t2 <= r.deadline; ++t2) {
        double room = 1e300;
        for (ChannelId c : r.path.channels) room = std::min(room, g.capacity(c) - g.load(c, t2));
        if (room > kEps) return true;
      }
    }
  }
  return false;
}

// Random arrivals on small graphs: every boundary keeps the grid, ALAP and
// pull-back invariants, and every admitted request finishes by its deadline.
TEST(SchedulerProperty, RandomRunsKeepGuarantees) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Topology t = seed % 2 ? generate_synthetic(5, seed) : gscale_topology();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DcRouteScheduler s(t);
    std::map<RequestId, Request> admitted;
    RequestId next_id = 0;
    for (Slot now = 0; now < 120; ++now) {
      const int arrivals = static_cast<int>(rng() % 4);
      for (int k = 0; k < arrivals; ++k) {
        const NodeId src = static_cast<NodeId>(rng() % static_cast<std::uint64_t>(t.node_count()));
        NodeId dst = static_cast<NodeId>(rng() % static_cast<std::uint64_t>(t.node_count()));
        if (dst == src) dst = (dst + 1) % t.node_count();
        const Slot len = 1 + static_cast<Slot>(rng() % 10);
        Request r = make_request(next_id++, src, dst, std::max(0.01, unit(rng) * len), now + len, now);
        const std::string before = s.grid().dump();
        if (s.allocate(r)) {
          admitted[r.id] = r;
          double placed = 0.0;
          for (Slot x = now + 2; x <= r.deadline; ++x) placed += s.grid().share(r.path.channels[0], x, r.id);
          EXPECT_NEAR(placed, r.volume, 1e-8);
        } else {
          EXPECT_EQ(s.grid().dump(), before);
        }
      }
      s.check_invariants(false);
      s.pull_back();
      s.push_forward();
      ASSERT_NO_THROW(s.check_invariants(true)) << "seed " << seed << " slot " << now;
      EXPECT_FALSE(delayable(s));
      EXPECT_LE(s.last_push_passes(), 10);
      ASSERT_NO_THROW(s.walk());
    }
    while (!s.active().empty()) {
      s.pull_back();
      s.push_forward();
      ASSERT_NO_THROW(s.walk());
    }
    EXPECT_EQ(s.completed().size(), admitted.size());
    for (const Request& done : s.completed()) {
      // Completion is recorded at the walk that shipped the last volume.
      EXPECT_EQ(admitted.at(done.id).path.nodes, done.path.nodes);
    }
  }
}

TEST(SchedulerProperty, ReplayIsDeterministic) {
  auto run = [] {
    const Topology t = gscale_topology();
    DcRouteScheduler s(t);
    std::mt19937_64 rng(3);
    std::ostringstream trace;
    RequestId id = 0;
    for (Slot now = 0; now < 40; ++now) {
      for (int k = 0; k < 3; ++k) {
        const NodeId a = static_cast<NodeId>(rng() % 12);
        const NodeId b = static_cast<NodeId>((a + 1 + rng() % 11) % 12);
        Request r = make_request(id++, a, b, 0.1 + (rng() % 100) / 25.0, now + 2 + static_cast<Slot>(rng() % 8), now);
        trace << s.allocate(r);
      }
      s.pull_back();
      s.push_forward();
      write_schedule(trace, s.walk());
      trace << s.grid().dump();
    }
    return trace.str();
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace dcroute
