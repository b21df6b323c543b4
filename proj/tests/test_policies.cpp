#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "speedscale/errors.hpp"
#include "speedscale/harness.hpp"
#include "speedscale/policies.hpp"
#include "speedscale/simulator.hpp"

namespace speedscale {
namespace {

const PowerFunction kQuadratic(2.0);

SystemState state_with(std::size_t m, const std::vector<double>& remaining) {
  SystemState s;
  s.servers = m;
  s.power = kQuadratic;
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    s.active.push_back({i, 0.0, remaining[i], remaining[i], std::nullopt, std::nullopt});
  }
  return s;
}

// Server each job first runs on.
std::vector<ServerId> servers_used(const Instance& instance, Policy& policy) {
  const Trajectory t = simulate(instance, policy).trajectory;
  std::map<JobId, ServerId> first;
  for (const Segment& seg : t.segments) {
    for (const SegmentJob& j : seg.jobs) {
      if (j.server && !first.count(j.id)) first[j.id] = *j.server;
    }
  }
  std::vector<ServerId> out;
  for (const Job& j : instance.jobs()) out.push_back(first.at(j.id));
  return out;
}

TEST(SrptSpeedScaling, ServesShortestJobsAtEnergyProportionalSpeed) {
  SrptSpeedScaling srpt;
  const PolicyDecision d = srpt.decide(state_with(2, {4.0, 1.0, 3.0, 2.0}));
  ASSERT_EQ(d.running.size(), 2u);
  std::vector<JobId> ids{d.running[0].job, d.running[1].job};
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, (std::vector<JobId>{1, 3}));
  for (const Allocation& a : d.running) EXPECT_NEAR(a.speed, std::sqrt(2.0), 1e-15);
  EXPECT_NE(d.running[0].server, d.running[1].server);

  const PolicyDecision one = srpt.decide(state_with(4, {2.5}));
  ASSERT_EQ(one.running.size(), 1u);
  EXPECT_DOUBLE_EQ(one.running[0].speed, 1.0);
  EXPECT_TRUE(srpt.decide(state_with(3, {})).running.empty());
}

TEST(SrptSpeedScaling, TiesBreakByLowestId) {
  SrptSpeedScaling srpt;
  const PolicyDecision d = srpt.decide(state_with(1, {2.0, 1.0, 1.0}));
  ASSERT_EQ(d.running.size(), 1u);
  EXPECT_EQ(d.running[0].job, 1u);
}

TEST(RoundRobinUnit, IsolatedUnitJobs) {
  RoundRobinUnit rr;
  const Instance spread = Instance::from_arrivals(2, kQuadratic, {{0.0, 1.0}, {0.0, 1.0}, {10.0, 1.0}});
  EXPECT_NEAR(simulate(spread, rr).cost.total, 6.0, 1e-12);
  const Instance single = Instance::from_arrivals(1, kQuadratic, {{0.0, 1.0}});
  EXPECT_NEAR(simulate(single, rr).cost.total, 2.0, 1e-12);
}

TEST(RoundRobinUnit, TwoJobsOnOneServerMatchBurstValue) {
  RoundRobinUnit rr;
  const Instance pair = Instance::from_arrivals(1, kQuadratic, {{0.0, 1.0}, {0.0, 1.0}});
  EXPECT_NEAR(simulate(pair, rr).cost.total, 2.0 * (1.0 + std::sqrt(2.0)), 1e-9);
}

TEST(RoundRobinUnit, RejectsMixedSizes) {
  RoundRobinUnit rr;
  const Instance mixed = Instance::from_arrivals(2, kQuadratic, {{0.0, 1.0}, {0.0, 2.0}});
  EXPECT_THROW(simulate(mixed, rr), PolicyError);
}

TEST(GreedyLeastWorkload, LargeJobIsolatedThenUnitPile) {
  GreedyLeastWorkload lw;
  EXPECT_EQ(servers_used(gen_least_workload_adversary(2, 4, kQuadratic), lw),
            (std::vector<ServerId>{0, 1, 1, 1, 1}));
  EXPECT_EQ(servers_used(Instance::from_arrivals(3, kQuadratic, {{0.0, 1.0}}), lw), (std::vector<ServerId>{0}));
  EXPECT_EQ(servers_used(Instance::from_arrivals(2, kQuadratic, {{0.0, 1.0}, {0.0, 1.0}}), lw),
            (std::vector<ServerId>{0, 1}));
}

TEST(GreedyLeastDispatched, MatchesWorkloadRoutingBeforeCompletions) {
  GreedyLeastDispatched ld;
  EXPECT_EQ(servers_used(gen_least_workload_adversary(2, 4, kQuadratic), ld),
            (std::vector<ServerId>{0, 1, 1, 1, 1}));
  const Instance spaced =
      Instance::from_arrivals(2, kQuadratic, {{0.0, 3.0}, {1e-6, 1.0}, {2e-6, 1.0}, {3e-6, 1.0}});
  EXPECT_EQ(servers_used(spaced, ld), (std::vector<ServerId>{0, 1, 1, 1}));
  const Instance alternating =
      Instance::from_arrivals(2, kQuadratic, {{0.0, 1.0}, {5.0, 1.0}, {10.0, 1.0}, {15.0, 1.0}});
  EXPECT_EQ(servers_used(alternating, ld), (std::vector<ServerId>{0, 1, 0, 1}));
}

TEST(JoinShortestQueue, RoundRobinsUnderRapidArrivals) {
  JoinShortestQueue jsq;
  EXPECT_EQ(servers_used(gen_jsq_adversary(2, 8, kQuadratic), jsq), (std::vector<ServerId>{0, 1, 0, 1}));
  std::vector<std::pair<double, double>> six;
  for (int i = 0; i < 6; ++i) six.emplace_back(1e-6 * i, 1.0);
  const auto used = servers_used(Instance::from_arrivals(3, kQuadratic, six), jsq);
  for (ServerId k = 0; k < 3; ++k) EXPECT_EQ(std::count(used.begin(), used.end(), k), 2);
}

TEST(NonmigratorySrpt, RoutesLargeJobsTogether) {
  NonmigratorySrpt nm;
  EXPECT_EQ(servers_used(gen_nonmigratory_srpt_adversary(2, 4.0, 0.1, kQuadratic), nm),
            (std::vector<ServerId>{0, 1, 1}));
  EXPECT_EQ(servers_used(Instance::from_arrivals(2, kQuadratic, {{0.0, 2.0}}), nm), (std::vector<ServerId>{0}));
  // A busy server whose shortest job exceeds the arrival beats an idle one.
  const Instance shorter = Instance::from_arrivals(2, kQuadratic, {{0.0, 5.0}, {0.0, 4.0}});
  EXPECT_EQ(servers_used(shorter, nm), (std::vector<ServerId>{0, 0}));
  // No idle server: the lowest index with y_k > x wins.
  const Instance small_last = Instance::from_arrivals(2, kQuadratic, {{0.0, 1.0}, {0.0, 4.0}, {1e-6, 0.5}});
  EXPECT_EQ(servers_used(small_last, nm), (std::vector<ServerId>{0, 1, 0}));
}

TEST(DispatchPolicies, NeverMigrate) {
  const Instance inst = gen_jsq_adversary(3, 27, kQuadratic);
  for (PolicyKind kind : {PolicyKind::GreedyLeastWorkload, PolicyKind::GreedyLeastDispatched,
                          PolicyKind::JoinShortestQueue, PolicyKind::NonmigratorySrpt}) {
    auto policy = make_policy(PolicyConfig{kind});
    const Trajectory t = simulate(inst, *policy).trajectory;
    std::map<JobId, ServerId> server;
    for (const Segment& seg : t.segments) {
      for (const SegmentJob& j : seg.jobs) {
        if (!j.server) continue;
        auto [it, fresh] = server.emplace(j.id, *j.server);
        EXPECT_EQ(it->second, *j.server) << policy->name();
      }
    }
  }
}

TEST(RandomGatedStatic, SingleJobAtFixedSpeed) {
  RandomGatedStatic rgs(2.0, 1);
  const Instance one = Instance::from_arrivals(1, kQuadratic, {{0.0, 1.0}});
  const CostBreakdown c = simulate(one, rgs).cost;
  EXPECT_NEAR(c.flow_time, 0.5, 1e-12);
  EXPECT_NEAR(c.energy, 2.0, 1e-12);
  EXPECT_NEAR(c.total, 2.5, 1e-12);
}

TEST(RandomGatedStatic, ProcessorSharingSplitsSpeed) {
  RandomGatedStatic rgs(2.0, 1);
  const Instance pair = Instance::from_arrivals(1, kQuadratic, {{0.0, 1.0}, {0.0, 1.0}});
  const Trajectory t = simulate(pair, rgs).trajectory;
  ASSERT_FALSE(t.segments.empty());
  for (const SegmentJob& j : t.segments[0].jobs) EXPECT_DOUBLE_EQ(j.speed, 1.0);
  EXPECT_NEAR(segment_power(t.segments[0], kQuadratic), 4.0, 1e-12);
  EXPECT_THROW(RandomGatedStatic(0.0, 1), std::invalid_argument);
}

TEST(PolicyConfig, ParsesNamesAndJson) {
  for (PolicyKind k : all_policy_kinds()) EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  EXPECT_THROW(parse_policy_kind("fastest"), std::invalid_argument);
  const PolicyConfig c = parse_policy_config(R"({"kind": "random-gated-static", "params": {"speed": 2, "seed": 4}})");
  EXPECT_EQ(c.kind, PolicyKind::RandomGatedStatic);
  EXPECT_EQ(c.speed, 2.0);
  EXPECT_EQ(c.seed, 4u);
  const PolicyConfig back = parse_policy_config(dump_policy_config(c));
  EXPECT_EQ(back.speed, 2.0);
  EXPECT_EQ(make_policy(parse_policy_config("jsq"))->name(), "jsq");
}

}  // namespace
}  // namespace speedscale
