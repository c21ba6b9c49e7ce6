#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "dcroute/baselines.hpp"
#include "dcroute/dcroute.hpp"
#include "dcroute/harness.hpp"
#include "dcroute/workload.hpp"

using namespace dcroute;

namespace {

Request make_request(RequestId id, NodeId src, NodeId dst, double volume, Slot deadline, Slot arrival = 0) {
  Request r;
  r.id = id;
  r.src = src;
  r.dst = dst;
  r.volume = volume;
  r.residual = volume;
  r.deadline = deadline;
  r.arrival = arrival;
  return r;
}

ActiveDemand active(RequestId id, NodeId src, NodeId dst, double residual, Slot deadline,
                    std::vector<Path> paths = {}) {
  ActiveDemand a;
  a.request = make_request(id, src, dst, residual, deadline);
  a.known_paths = std::move(paths);
  return a;
}

Topology line2(double cap = 1.0) { return Topology(2, {{0, 1, cap}}); }

// 0-1 direct plus the detour 0-2-1.
Topology triangle() { return Topology(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}); }

Topology random_topology(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> cap(0.5, 2.0);
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    edges.push_back({parent(rng), i, cap(rng)});
  }
  std::bernoulli_distribution extra(0.35);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const bool exists = std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
        return (e.u == a && e.v == b) || (e.u == b && e.v == a);
      });
      if (!exists && extra(rng)) edges.push_back({a, b, cap(rng)});
    }
  }
  return Topology(n, edges);
}

// Edmonds-Karp over the directed channels.
double max_flow(const Topology& t, NodeId s, NodeId d) {
  const int n = t.node_count();
  std::vector<std::vector<double>> cap(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (ChannelId c = 0; c < t.channel_count(); ++c) {
    cap[static_cast<std::size_t>(t.channel_from(c))][static_cast<std::size_t>(t.channel_to(c))] += t.channel_capacity(c);
  }
  double total = 0.0;
  for (;;) {
    std::vector<int> pred(static_cast<std::size_t>(n), -1);
    pred[static_cast<std::size_t>(s)] = s;
    std::queue<int> q;
    q.push(s);
    while (!q.empty() && pred[static_cast<std::size_t>(d)] < 0) {
      const int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v) {
        if (pred[static_cast<std::size_t>(v)] < 0 && cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] > 1e-12) {
          pred[static_cast<std::size_t>(v)] = u;
          q.push(v);
        }
      }
    }
    if (pred[static_cast<std::size_t>(d)] < 0) return total;
    double push = kInfinity;
    for (int v = d; v != s; v = pred[static_cast<std::size_t>(v)]) {
      push = std::min(push, cap[static_cast<std::size_t>(pred[static_cast<std::size_t>(v)])][static_cast<std::size_t>(v)]);
    }
    for (int v = d; v != s; v = pred[static_cast<std::size_t>(v)]) {
      const auto u = static_cast<std::size_t>(pred[static_cast<std::size_t>(v)]);
      cap[u][static_cast<std::size_t>(v)] -= push;
      cap[static_cast<std::size_t>(v)][u] += push;
    }
    total += push;
  }
}

double slot_model_optimum(const Topology& t, Slot now, const std::vector<ActiveDemand>& act,
                          const Request& in, const BaselineKind& kind, LpStatus* status = nullptr) {
  const LpModel m = build_multipath_model(t, now, act, in, kind, LpObjective::kMinimax);
  const LpSolution s = solve_lp(m);
  if (status) *status = s.status;
  return s.objective;
}

}  // namespace

TEST(BaselineKind, ParsesTags) {
  EXPECT_EQ(BaselineKind::parse("global-lp").family, BaselineFamily::kGlobalLp);
  const BaselineKind k3 = BaselineKind::parse("ksp-lp:3");
  EXPECT_EQ(k3.family, BaselineFamily::kKspLp);
  EXPECT_EQ(k3.k, 3);
  EXPECT_EQ(BaselineKind::parse("pip-pmc").k, 20);
  EXPECT_EQ(BaselineKind::parse("pip-spmc:5").k, 5);
  EXPECT_EQ(BaselineKind::parse("pip-spmc").tag(), "pip-spmc:20");
  EXPECT_EQ(k3.tag(), "ksp-lp:3");
  for (const char* bad : {"ksp-lp", "ksp-lp:0", "ksp-lp:x", "global-lp:2", "dcroute", "pip-pmc:-1"}) {
    EXPECT_THROW(BaselineKind::parse(bad), std::invalid_argument) << bad;
  }
}

TEST(MultipathModel, SingleRequestFitsWithinCapacityTimesSlots) {
  const Topology t = line2(2.0);
  for (const char* tag : {"global-lp", "ksp-lp:1"}) {
    const BaselineKind kind = BaselineKind::parse(tag);
    LpStatus st;
    // 5 units over 3 slots of capacity 2: z = 5/6.
    EXPECT_NEAR(slot_model_optimum(t, 0, {}, make_request(1, 0, 1, 5.0, 3), kind, &st), 5.0 / 6.0, 1e-9);
    EXPECT_EQ(st, LpStatus::kOptimal);
    PathCache cache(t, 1);
    const AdmissionResult ok = admit_multipath(t, 0, {}, make_request(1, 0, 1, 5.0, 3), kind, {}, cache);
    EXPECT_TRUE(ok.admitted) << tag;
    EXPECT_NEAR(ok.objective, 5.0 / 6.0, 1e-9);
    const AdmissionResult no = admit_multipath(t, 0, {}, make_request(1, 0, 1, 6.5, 3), kind, {}, cache);
    EXPECT_FALSE(no.admitted) << tag;
  }
}

TEST(MultipathModel, CountingBoundRejectsSecondUnitDemand) {
  const Topology t = line2();
  const std::vector<ActiveDemand> act{active(1, 0, 1, 1.0, 1)};
  const Request in = make_request(2, 0, 1, 1.0, 1);
  for (const char* tag : {"global-lp", "ksp-lp:1"}) {
    const BaselineKind kind = BaselineKind::parse(tag);
    EXPECT_NEAR(slot_model_optimum(t, 0, act, in, kind), 2.0, 1e-9);
    PathCache cache(t, 1);
    EXPECT_FALSE(admit_multipath(t, 0, act, in, kind, {}, cache).admitted) << tag;
    BaselineOptions feas;
    feas.objective = LpObjective::kFeasibility;
    EXPECT_FALSE(admit_multipath(t, 0, act, in, kind, feas, cache).admitted) << tag;
    const LpSolution s = solve_lp(build_multipath_model(t, 0, act, in, kind, LpObjective::kFeasibility));
    EXPECT_EQ(s.status, LpStatus::kInfeasible);
  }
}

TEST(MultipathModel, GlobalMatchesMaxFlowOverTime) {
  // Single source-destination pair: the demands are feasible iff for every
  // deadline d the demand due by d fits (d - now) slots of max flow.
  std::mt19937_64 rng(7);
  int admitted = 0;
  int rejected = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + trial % 3;
    const Topology t = random_topology(rng, n);
    std::uniform_int_distribution<NodeId> node(0, n - 1);
    const NodeId s = node(rng);
    NodeId d = node(rng);
    if (d == s) d = (s + 1) % n;
    const double f = max_flow(t, s, d);
    const Slot now = 3;
    std::uniform_int_distribution<Slot> dl(now + 1, now + 5);
    std::uniform_real_distribution<double> vol(0.1, 2.5 * f);
    std::vector<ActiveDemand> act;
    for (int i = 0; i < trial % 3; ++i) act.push_back(active(i, s, d, vol(rng), dl(rng)));
    const Request in = make_request(99, s, d, vol(rng), dl(rng));

    std::vector<std::pair<Slot, double>> due;
    for (const ActiveDemand& a : act) due.emplace_back(a.request.deadline, a.request.residual);
    due.emplace_back(in.deadline, in.volume);
    std::sort(due.begin(), due.end());
    double margin = kInfinity;
    double cum = 0.0;
    for (const auto& [deadline, v] : due) {
      cum += v;
      margin = std::min(margin, static_cast<double>(deadline - now) * f - cum);
    }
    if (std::abs(margin) < 1e-6) continue;
    const bool expect = margin > 0;

    const BaselineKind global = BaselineKind::parse("global-lp");
    PathCache cache(t, 1);
    const AdmissionResult r = admit_multipath(t, now, act, in, global, {}, cache);
    EXPECT_EQ(r.admitted, expect) << "trial " << trial;
    LpStatus st;
    const double z = slot_model_optimum(t, now, act, in, global, &st);
    EXPECT_EQ(st, LpStatus::kOptimal);
    EXPECT_EQ(z <= 1.0 + 1e-9, expect) << "trial " << trial;
    // With every simple path available the path LP is the edge LP.
    PathCache all(t, 1000);
    const AdmissionResult k = admit_multipath(t, now, act, in, BaselineKind{BaselineFamily::kKspLp, 1000}, {}, all);
    EXPECT_EQ(k.admitted, expect) << "trial " << trial;
    EXPECT_NEAR(k.objective, r.objective, 1e-7);
    (expect ? admitted : rejected)++;
  }
  EXPECT_GT(admitted, 5);
  EXPECT_GT(rejected, 5);
}

TEST(MultipathModel, IntervalSolveMatchesSlotModel) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + trial % 2;
    const Topology t = random_topology(rng, n);
    std::uniform_int_distribution<NodeId> node(0, n - 1);
    std::uniform_int_distribution<Slot> dl(11, 16);
    std::uniform_real_distribution<double> vol(0.2, 3.0);
    auto pair = [&] {
      const NodeId s = node(rng);
      NodeId d = node(rng);
      if (d == s) d = (s + 1) % n;
      return std::make_pair(s, d);
    };
    std::vector<ActiveDemand> act;
    for (int i = 0; i < 4; ++i) {
      const auto [s, d] = pair();
      act.push_back(active(i, s, d, vol(rng), dl(rng)));
    }
    const auto [s, d] = pair();
    const Request in = make_request(50, s, d, vol(rng), dl(rng));
    for (const char* tag : {"global-lp", "ksp-lp:2"}) {
      const BaselineKind kind = BaselineKind::parse(tag);
      PathCache cache(t, std::max(kind.k, 1));
      const double z = slot_model_optimum(t, 10, act, in, kind);
      const AdmissionResult r = admit_multipath(t, 10, act, in, kind, {}, cache);
      if (std::abs(z - 1.0) > 1e-6) EXPECT_EQ(r.admitted, z < 1.0) << tag << " trial " << trial;
      if (!r.admitted) continue;
      EXPECT_NEAR(r.objective, z, 1e-7) << tag << " trial " << trial;
      // The plan meets every demand exactly and respects capacity per slot.
      std::map<std::pair<ChannelId, Slot>, double> load;
      double vol_sum = 0.0;
      for (const RequestPlan& rp : r.plan) {
        double got = 0.0;
        for (const PathPlan& pp : rp.paths) {
          for (std::size_t i = 0; i < pp.per_slot.size(); ++i) {
            got += pp.per_slot[i];
            for (ChannelId c : pp.path.channels) load[{c, 11 + static_cast<Slot>(i)}] += pp.per_slot[i];
          }
        }
        const double want = rp.id == in.id ? in.volume
                                           : std::find_if(act.begin(), act.end(), [&](const ActiveDemand& a) {
                                               return a.request.id == rp.id;
                                             })->request.residual;
        EXPECT_NEAR(got, want, 1e-9);
        vol_sum += got;
      }
      EXPECT_EQ(r.plan.size(), act.size() + 1);
      for (const auto& [key, v] : load) EXPECT_LE(v, t.channel_capacity(key.first) + 1e-7);
    }
  }
}

TEST(MultipathModel, SlotModelShapes) {
  const Topology t = triangle();
  const Request in = make_request(5, 0, 1, 1.0, 3);
  const LpModel g = build_multipath_model(t, 0, {}, in, BaselineKind::parse("global-lp"), LpObjective::kMinimax);
  // z, then 6 channels x 3 slots of edge flows.
  EXPECT_EQ(g.variable_count(), 1 + 6 * 3);
  // 6 x 3 capacity rows, one demand row, relay node 2 conserved in 3 slots.
  EXPECT_EQ(g.row_count(), 18 + 1 + 3);
  const LpModel k =
      build_multipath_model(t, 0, {}, in, BaselineKind::parse("ksp-lp:2"), LpObjective::kFeasibility);
  EXPECT_EQ(k.variable_count(), 2 * 3);
  EXPECT_GE(k.find_variable("r5_p1_t3"), 0);
  EXPECT_THROW(build_multipath_model(t, 0, {}, in, BaselineKind::parse("pip-pmc"), LpObjective::kMinimax),
               std::invalid_argument);
}

TEST(Pip, SingleCandidateAdmitsUnderBothVariants) {
  const Topology t = line2();
  for (const char* tag : {"pip-pmc", "pip-spmc"}) {
    PathCache cache(t, 20);
    const AdmissionResult r = admit_pip(t, 0, {}, make_request(1, 0, 1, 1.5, 2), BaselineKind::parse(tag), {}, cache);
    ASSERT_TRUE(r.admitted) << tag;
    ASSERT_EQ(r.plan.size(), 1u);
    EXPECT_EQ(r.plan[0].paths.size(), 1u);
    EXPECT_NEAR(r.objective, 0.75, 1e-9);
  }
}

TEST(Pip, SaturatedShortPathForcesDetour) {
  const Topology t = triangle();
  const Path direct = path_from_nodes(t, std::vector<NodeId>{0, 1});
  const Path detour = path_from_nodes(t, std::vector<NodeId>{0, 2, 1});
  const std::vector<ActiveDemand> act{active(1, 0, 1, 2.0, 2, {direct})};
  const Request in = make_request(2, 0, 1, 1.0, 2);
  // Manual check: on the direct path 3 units need 3 slots of a 2-slot unit
  // channel; on the detour each slot carries 0.5 and the direct channel stays
  // at 1, so z = 1.
  for (const char* tag : {"pip-pmc", "pip-spmc"}) {
    PathCache cache(t, 20);
    const AdmissionResult r = admit_pip(t, 0, act, in, BaselineKind::parse(tag), {}, cache);
    ASSERT_TRUE(r.admitted) << tag;
    EXPECT_NEAR(r.objective, 1.0, 1e-9);
    const auto& plan = *std::find_if(r.plan.begin(), r.plan.end(), [](const RequestPlan& p) { return p.id == 2; });
    ASSERT_EQ(plan.paths.size(), 1u);
    EXPECT_EQ(plan.paths[0].path, detour) << tag;
  }
}

TEST(Pip, PmcPrefersLowerUtilizationSpmcFewerHops) {
  const Topology t = triangle();
  const Path direct = path_from_nodes(t, std::vector<NodeId>{0, 1});
  const std::vector<ActiveDemand> act{active(1, 0, 1, 1.0, 2, {direct})};
  const Request in = make_request(2, 0, 1, 0.5, 2);
  // Direct: z = 1.5 / 2 = 0.75. Detour: the direct channel keeps 0.5 per slot
  // and the detour carries 0.25, so z = 0.5.
  PathCache cache(t, 20);
  const AdmissionResult pmc = admit_pip(t, 0, act, in, BaselineKind::parse("pip-pmc"), {}, cache);
  const AdmissionResult spmc = admit_pip(t, 0, act, in, BaselineKind::parse("pip-spmc"), {}, cache);
  ASSERT_TRUE(pmc.admitted);
  ASSERT_TRUE(spmc.admitted);
  EXPECT_NEAR(pmc.objective, 0.5, 1e-9);
  EXPECT_NEAR(spmc.objective, 0.75, 1e-9);
  auto chosen = [](const AdmissionResult& r) {
    return std::find_if(r.plan.begin(), r.plan.end(), [](const RequestPlan& p) { return p.id == 2; })->paths[0].path;
  };
  EXPECT_EQ(chosen(pmc).hops(), 2);
  EXPECT_EQ(chosen(spmc).hops(), 1);
}

TEST(Pip, NoFeasibleCandidateRejectsAndLeavesStateAlone) {
  const Topology t = triangle();
  LpBaselineScheduler s(t, BaselineKind::parse("pip-pmc"));
  Request a = make_request(1, 0, 1, 2.0, 2);
  ASSERT_TRUE(s.admit(a));
  EXPECT_EQ(a.state, RequestState::kAdmitted);
  const std::string before = s.dump();
  // Every single path carries at most 2 units by slot 2.
  Request b = make_request(2, 0, 1, 2.5, 2);
  EXPECT_FALSE(s.admit(b));
  EXPECT_EQ(b.state, RequestState::kRejected);
  EXPECT_EQ(s.dump(), before);
  EXPECT_EQ(s.active_count(), 1u);
  s.check_invariants();
}

TEST(Oracle, EmptyGridDeliversSlotsTimesNarrowestCapacity) {
  const Topology t(4, {{0, 1, 2.0}, {1, 2, 0.5}, {2, 3, 1.0}, {0, 3, 3.0}});
  AllocationGrid g(t.channel_capacities(), 0);
  const Request r = make_request(1, 0, 2, 1.0, 4);
  const OracleResult o = oracle_single_path_admissible(t, g, r);
  ASSERT_EQ(o.per_path.size(), 2u);
  EXPECT_NEAR(o.per_path[0].second, 4 * 0.5, 1e-12);  // 0-1-2
  EXPECT_NEAR(o.per_path[1].second, 4 * 1.0, 1e-12);  // 0-3-2
  EXPECT_NEAR(o.best, 4.0, 1e-12);
  EXPECT_TRUE(o.admissible);
  EXPECT_FALSE(oracle_single_path_admissible(t, g, make_request(2, 0, 2, 4.5, 4)).admissible);
}

TEST(Oracle, LoadOnOneSlotReducesDeliverableExactly) {
  const Topology t(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  AllocationGrid g(t.channel_capacities(), 0);
  g.extend_window(3);
  g.add_share(t.find_channel(1, 2), 2, 7, 0.5);
  const Request r = make_request(1, 0, 2, 1.0, 3);
  EXPECT_NEAR(oracle_single_path_admissible(t, g, r).best, 2.5, 1e-12);
  // Reverse channel is independent.
  EXPECT_NEAR(oracle_single_path_admissible(t, g, make_request(2, 2, 0, 1.0, 3)).best, 3.0, 1e-12);
}

TEST(Oracle, RefusesLargeTopologies) {
  const Topology t = gscale_topology();
  AllocationGrid g(t.channel_capacities(), 0);
  EXPECT_THROW(oracle_single_path_admissible(t, g, make_request(1, 0, 5, 1.0, 3)), std::length_error);
}

TEST(Oracle, DcRouteAdmissionsAreOracleFeasible) {
  std::mt19937_64 rng(3);
  int admissions = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Topology t = random_topology(rng, 4);
    DcRouteScheduler s(t);
    std::uniform_int_distribution<NodeId> node(0, 3);
    std::uniform_int_distribution<Slot> len(1, 6);
    std::uniform_real_distribution<double> vol(0.1, 3.0);
    RequestId id = 0;
    for (Slot slot = 0; slot < 10; ++slot) {
      for (int k = 0; k < 2; ++k) {
        const NodeId a = node(rng);
        const NodeId b = (a + 1 + node(rng) % 3) % 4;
        Request r = make_request(id++, a, b, vol(rng), slot + len(rng), slot);
        AllocationGrid before = s.grid();
        if (!s.allocate(r)) continue;
        ++admissions;
        before.extend_window(r.deadline);
        EXPECT_GE(deliverable_volume(before, r.path, r.deadline) + 1e-9, r.volume);
        EXPECT_TRUE(oracle_single_path_admissible(t, before, r).admissible);
      }
      s.pull_back();
      s.push_forward();
      s.walk();
    }
  }
  EXPECT_GT(admissions, 100);
}

TEST(LpScheduler, RunsKeepCapacityDemandAndDeadlines) {
  const Topology t = generate_synthetic(5, 4);
  WorkloadConfig w;
  w.lambda = 5.0;
  w.horizon = 30;
  w.mean_length = 5.0;
  w.vol_fraction = 0.8;
  for (std::uint64_t seed : {1u, 2u}) {
    w.seed = seed;
    const auto trace = generate_trace(w, t);
    for (const char* tag : {"global-lp", "ksp-lp:1", "ksp-lp:3", "pip-pmc", "pip-spmc"}) {
      for (bool fill : {true, false}) {
        BaselineOptions o;
        o.fill_next_slot = fill;
        LpBaselineScheduler s(t, BaselineKind::parse(tag), o);
        const SimMetrics m = run_simulation(s, trace);
        EXPECT_EQ(m.violations, 0u);
        EXPECT_GT(m.admitted, 0u) << tag;
        EXPECT_LT(m.admitted, m.requests) << tag;
        EXPECT_NEAR(m.delivered_volume, m.offered_volume - m.rejected_volume, 1e-6);
      }
    }
  }
}

TEST(LpScheduler, FeasibilityObjectiveAdmitsLikeMinimax) {
  // Both objectives decide feasibility of the same constraint set, so the
  // first admission decision on every state agrees.
  const Topology t = generate_synthetic(5, 9);
  WorkloadConfig w;
  w.lambda = 3.0;
  w.horizon = 30;
  w.mean_length = 4.0;
  w.vol_fraction = 0.5;
  const auto trace = generate_trace(w, t);
  const auto reqs = to_requests(trace);
  for (const char* tag : {"global-lp", "ksp-lp:3"}) {
    const BaselineKind kind = BaselineKind::parse(tag);
    LpBaselineScheduler s(t, kind);
    PathCache cache(t, std::max(kind.k, 1));
    BaselineOptions feas;
    feas.objective = LpObjective::kFeasibility;
    std::size_t next = 0;
    int checked = 0;
    while (next < reqs.size()) {
      for (; next < reqs.size() && reqs[next].arrival == s.now(); ++next) {
        Request r = reqs[next];
        const AdmissionResult f = admit_multipath(t, s.now(), s.active_demands(), r, kind, feas, cache);
        const bool got = s.admit(r);
        if (std::abs(s.last_result().objective - 1.0) > 1e-6) {
          EXPECT_EQ(f.admitted, got) << tag << " request " << r.id;
          ++checked;
        }
      }
      s.boundary();
      s.walk();
    }
    EXPECT_GT(checked, 30);
  }
}

TEST(LpScheduler, PipAdmissionsAreKspAdmissible) {
  const Topology t = generate_synthetic(6, 2);
  WorkloadConfig w;
  w.lambda = 3.0;
  w.horizon = 40;
  w.mean_length = 5.0;
  w.vol_fraction = 0.4;
  const auto reqs = to_requests(generate_trace(w, t));
  for (const char* tag : {"pip-pmc:3", "pip-spmc:3"}) {
    LpBaselineScheduler s(t, BaselineKind::parse(tag));
    const BaselineKind ksp{BaselineFamily::kKspLp, 3};
    PathCache cache(t, 3);
    std::size_t next = 0;
    int admitted = 0;
    while (next < reqs.size()) {
      for (; next < reqs.size() && reqs[next].arrival == s.now(); ++next) {
        Request r = reqs[next];
        const auto act = s.active_demands();
        if (!s.admit(r)) continue;
        ++admitted;
        EXPECT_TRUE(admit_multipath(t, s.now(), act, r, ksp, {}, cache).admitted) << tag << " request " << r.id;
      }
      s.boundary();
      s.walk();
    }
    EXPECT_GT(admitted, 20);
  }
}

TEST(LpScheduler, MorePathsRejectNoMoreVolume) {
  const Topology t = gscale_topology();
  WorkloadConfig w;
  w.lambda = 6.0;
  w.horizon = 40;
  for (std::uint64_t seed : {1u, 2u}) {
    w.seed = seed;
    const auto trace = generate_trace(w, t);
    LpBaselineScheduler k1(t, BaselineKind::parse("ksp-lp:1"));
    LpBaselineScheduler k7(t, BaselineKind::parse("ksp-lp:7"));
    SimOptions fast;
    fast.check_invariants = false;
    const SimMetrics m1 = run_simulation(k1, trace, fast);
    const SimMetrics m7 = run_simulation(k7, trace, fast);
    EXPECT_LE(m7.rejected_volume, m1.rejected_volume + 1e-9) << "seed " << seed;
  }
}

TEST(LpScheduler, RejectsMalformedRequests) {
  const Topology t = triangle();
  LpBaselineScheduler s(t, BaselineKind::parse("global-lp"));
  Request same = make_request(1, 1, 1, 1.0, 2);
  EXPECT_FALSE(s.admit(same));
  Request empty = make_request(2, 0, 1, 0.0, 2);
  EXPECT_FALSE(s.admit(empty));
  Request late = make_request(3, 0, 1, 1.0, 0);
  EXPECT_FALSE(s.admit(late));
  Request outside = make_request(4, 0, 7, 1.0, 2);
  EXPECT_FALSE(s.admit(outside));
  Request future = make_request(5, 0, 1, 1.0, 4, 2);
  EXPECT_THROW(s.admit(future), std::logic_error);
  // The LP may use the very next slot, unlike DCRoute.
  Request next = make_request(6, 0, 1, 1.0, 1);
  EXPECT_TRUE(s.admit(next));
}
