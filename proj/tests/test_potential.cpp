#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "speedscale/harness.hpp"
#include "speedscale/offline.hpp"
#include "speedscale/policies.hpp"
#include "speedscale/potential.hpp"

namespace speedscale {
namespace {

const PowerFunction kQuadratic(2.0);

// Midpoint-rule integral of f(max(0, n(q) - n_o(q))) over q, f recomputed from its definition.
double phi1_quadrature(const ProfileAtTime& p, double c1, std::size_t steps = 200000) {
  double top = 0.0;
  for (double r : p.alg_remaining) top = std::max(top, r);
  if (top == 0.0) return 0.0;
  const double h = top / static_cast<double>(steps);
  double total = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double q = (static_cast<double>(k) + 0.5) * h;
    const auto n = std::count_if(p.alg_remaining.begin(), p.alg_remaining.end(), [&](double r) { return r >= q; });
    const auto no = std::count_if(p.opp_remaining.begin(), p.opp_remaining.end(), [&](double r) { return r >= q; });
    double f = 0.0;
    for (long j = 1; j <= n - no; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(p.m);
      f += p.power.derivative(p.power.inverse(x));
    }
    total += f * h;
  }
  return c1 * total;
}

TEST(FTable, UnrolledRecursion) {
  EXPECT_NEAR(f_value(kQuadratic, 2, 1), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(f_value(kQuadratic, 2, 2), std::sqrt(2.0) + 2.0, 1e-14);
  EXPECT_EQ(f_value(PowerFunction(3.0), 5, 0), 0.0);
  FTable f(PowerFunction(2.5), 3);
  EXPECT_NEAR(f(4), f_value(PowerFunction(2.5), 3, 4), 1e-14);
}

TEST(Phi1, HandIntegratedProfile) {
  const ProfileAtTime p{{1.0, 2.0}, {1.5}, 1, kQuadratic};
  EXPECT_NEAR(phi1(p, 2.0), 6.0, 1e-12);
  EXPECT_EQ(phi1(ProfileAtTime{{1.0, 3.0}, {1.0, 3.0}, 2, kQuadratic}, 5.0), 0.0);
  EXPECT_EQ(phi1(ProfileAtTime{{}, {5.0}, 1, kQuadratic}, 2.0), 0.0);
}

TEST(Phi1, MatchesQuadratureOnRandomProfiles) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> size(0.05, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    ProfileAtTime p;
    p.m = 1 + trial % 4;
    p.power = PowerFunction(1.3 + 0.1 * trial, 1.0 + 0.05 * trial);
    for (int i = 0; i < 1 + trial % 6; ++i) p.alg_remaining.push_back(size(rng));
    for (int i = 0; i < trial % 5; ++i) p.opp_remaining.push_back(size(rng));
    const double exact = phi1(p, 1.7);
    EXPECT_NEAR(exact, phi1_quadrature(p, 1.7), 1e-3 * std::max(1.0, exact)) << "trial " << trial;
  }
}

TEST(Phi2, WorkDifference) {
  EXPECT_NEAR(phi2(ProfileAtTime{{2.0, 3.0}, {1.0}, 1, kQuadratic}, 2.0), 8.0, 1e-14);
  EXPECT_EQ(phi2(ProfileAtTime{{2.0}, {2.0}, 1, kQuadratic}, 2.0), 0.0);
  EXPECT_NEAR(phi2(ProfileAtTime{{}, {4.0}, 1, kQuadratic}, 2.0), -8.0, 1e-14);
}

TEST(Constants, Presets) {
  const PotentialConstants srpt = srpt_comparator_constants(kQuadratic);
  EXPECT_DOUBLE_EQ(srpt.c1, 2.0);
  EXPECT_DOUBLE_EQ(srpt.c2, 2.0);
  EXPECT_DOUBLE_EQ(srpt.c, 4.0);
  const PotentialConstants general = general_comparator_constants(PowerFunction(1.5));
  EXPECT_DOUBLE_EQ(general.c1, 4.0);
  EXPECT_DOUBLE_EQ(general.c2, 3.0);
  EXPECT_DOUBLE_EQ(general.c, 7.0);
  EXPECT_THROW(general_comparator_constants(kQuadratic), std::invalid_argument);
  EXPECT_THROW(general_comparator_constants(PowerFunction(1.5, 2.0)), std::invalid_argument);
  EXPECT_NEAR(srpt_ratio_ceiling(kQuadratic, 2), 9.0, 1e-12);
  EXPECT_NEAR(srpt_ratio_ceiling(kQuadratic, 1), 4.0, 1e-12);
}

TEST(CheckDrift, EmptyInstanceIsVacuous) {
  const Instance empty(2, kQuadratic);
  SrptSpeedScaling srpt;
  const Trajectory t = simulate(empty, srpt).trajectory;
  const DriftReport r = check_drift(t, t, kQuadratic, srpt_comparator_constants(kQuadratic));
  EXPECT_TRUE(std::isinf(r.min_slack));
  EXPECT_TRUE(r.passed());
  const BoundaryReport b = check_boundary(t, t, kQuadratic, srpt_comparator_constants(kQuadratic));
  EXPECT_EQ(b.phi_start, 0.0);
  EXPECT_TRUE(b.passed());
}

TEST(CheckDrift, BurstAgainstOfflineSpeeds) {
  const Instance inst = Instance::from_arrivals(1, kQuadratic, {{0.0, 1.0}, {0.0, 2.0}});
  SrptSpeedScaling srpt;
  const Trajectory alg = simulate(inst, srpt).trajectory;
  std::vector<double> speeds;
  for (const ScheduledJob& s : brute_force_opt(inst).schedule) speeds.push_back(s.speed);
  PerJobSpeeds profile(speeds);
  const Trajectory opp = os_comparator(inst, profile);
  const DriftReport r = check_drift(alg, opp, kQuadratic, srpt_comparator_constants(kQuadratic));
  EXPECT_GE(r.min_slack, -1e-7);
  EXPECT_GE(r.min_integrated_slack, -1e-7);
  EXPECT_FALSE(r.samples.empty());
}

TEST(CheckDrift, ArbitraryComparatorWithGeneralConstants) {
  const PowerFunction p(1.5);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = harness::random_small_instance(rng, p);
    SrptSpeedScaling srpt;
    ArbitraryComparator opp_policy(1.0, 3.0, 100 + trial);
    const Trajectory alg = simulate(inst, srpt).trajectory;
    const Trajectory opp = simulate(inst, opp_policy).trajectory;
    const DriftReport r = check_drift(alg, opp, p, general_comparator_constants(p));
    EXPECT_GE(r.min_integrated_slack, -1e-7) << "trial " << trial;
  }
}

TEST(CheckDrift, DetectsViolationWithoutPotential) {
  const Instance inst = Instance::from_arrivals(2, kQuadratic, {{0.0, 1.0}, {0.2, 2.0}, {0.3, 0.5}});
  SrptSpeedScaling srpt;
  const Trajectory t = simulate(inst, srpt).trajectory;
  const DriftReport r = check_drift(t, t, kQuadratic, PotentialConstants{0.0, 0.0, 0.5});
  EXPECT_LT(r.min_integrated_slack, 0.0);
  EXPECT_LT(r.min_slack, 0.0);
  EXPECT_FALSE(r.passed());
}

TEST(CheckDrift, RejectsMismatchedTrajectories) {
  SrptSpeedScaling srpt;
  const Trajectory a = simulate(Instance::from_arrivals(1, kQuadratic, {{0.0, 1.0}}), srpt).trajectory;
  const Trajectory b = simulate(Instance::from_arrivals(1, kQuadratic, {{0.0, 2.0}}), srpt).trajectory;
  EXPECT_THROW(check_drift(a, b, kQuadratic, PotentialConstants{}), std::invalid_argument);
}

TEST(CheckBoundary, ArrivalsDoNotMovePotential) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = harness::random_small_instance(rng, PowerFunction(2.0 + 0.02 * trial));
    SrptSpeedScaling srpt;
    ConstantSpeeds half(0.5);
    const Trajectory alg = simulate(inst, srpt).trajectory;
    const Trajectory opp = os_comparator(inst, half);
    const BoundaryReport b = check_boundary(alg, opp, inst.power(), srpt_comparator_constants(inst.power()));
    EXPECT_NEAR(b.phi_start, 0.0, 1e-12);
    EXPECT_NEAR(b.phi_end, 0.0, 1e-9);
    EXPECT_LE(b.max_arrival_jump, 1e-9);
    EXPECT_LE(b.max_departure_jump, 1e-9);
  }
}

struct RandomProfile {
  ProfileAtTime profile;
  std::vector<double> alg_speeds;
  std::vector<double> opp_speeds;
};

std::vector<std::size_t> shortest_first(const std::vector<double>& r) {
  std::vector<std::size_t> idx(r.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  return idx;
}

RandomProfile random_profile(std::mt19937_64& rng, std::size_t m, const PowerFunction& power, bool srpt_comparator,
                             double lo, double hi) {
  std::uniform_real_distribution<double> size(0.1, 5.0);
  std::uniform_real_distribution<double> speed(lo, hi);
  std::uniform_int_distribution<std::size_t> count(0, 2 * m + 2);
  RandomProfile out;
  out.profile.m = m;
  out.profile.power = power;
  const std::size_t n = count(rng);
  const std::size_t no = count(rng);
  for (std::size_t i = 0; i < n; ++i) out.profile.alg_remaining.push_back(size(rng));
  for (std::size_t i = 0; i < no; ++i) out.profile.opp_remaining.push_back(size(rng));
  out.alg_speeds.assign(n, 0.0);
  const double rule = power.inverse(std::max(static_cast<double>(n) / static_cast<double>(m), 1.0));
  const auto alg_order = shortest_first(out.profile.alg_remaining);
  for (std::size_t k = 0; k < std::min(n, m); ++k) out.alg_speeds[alg_order[k]] = rule;
  out.opp_speeds.assign(no, 0.0);
  const auto opp_order = shortest_first(out.profile.opp_remaining);
  std::uniform_int_distribution<std::size_t> served(0, std::min(no, m));
  const std::size_t k_served = served(rng);
  for (std::size_t k = 0; k < k_served; ++k) {
    const std::size_t i = srpt_comparator ? opp_order[k] : opp_order[(k * 7 + 3) % no];
    if (out.opp_speeds[i] == 0.0) out.opp_speeds[i] = speed(rng);
  }
  return out;
}

TEST(DriftBound, SrptComparatorBoundsHold) {
  std::mt19937_64 rng(99);
  for (std::size_t m : {1u, 2u, 4u}) {
    const PotentialConstants k = srpt_comparator_constants(kQuadratic);
    for (int i = 0; i < 1000; ++i) {
      const RandomProfile p = random_profile(rng, m, kQuadratic, true, 0.05, 3.0);
      EXPECT_GE(check_drift_bound(p.profile, p.alg_speeds, p.opp_speeds, DriftBound::Phi1Srpt, k), -1e-7);
      EXPECT_GE(check_drift_bound(p.profile, p.alg_speeds, p.opp_speeds, DriftBound::Phi2Srpt, k), -1e-7);
    }
  }
}

TEST(DriftBound, FewerJobsThanServers) {
  std::mt19937_64 rng(5);
  const PotentialConstants k = srpt_comparator_constants(kQuadratic);
  int checked = 0;
  while (checked < 500) {
    const RandomProfile p = random_profile(rng, 4, kQuadratic, true, 0.05, 3.0);
    if (p.profile.alg_remaining.size() >= 4) continue;
    EXPECT_GE(check_drift_bound(p.profile, p.alg_speeds, p.opp_speeds, DriftBound::Phi1Srpt, k), -1e-7);
    ++checked;
  }
}

TEST(DriftBound, GeneralComparatorBoundsHold) {
  std::mt19937_64 rng(123);
  for (double alpha : {1.2, 1.5, 1.8}) {
    const PowerFunction p(alpha);
    const PotentialConstants k = general_comparator_constants(p);
    for (std::size_t m : {1u, 2u, 3u}) {
      for (int i = 0; i < 300; ++i) {
        const RandomProfile r = random_profile(rng, m, p, false, 1.0, 3.0);
        EXPECT_GE(check_drift_bound(r.profile, r.alg_speeds, r.opp_speeds, DriftBound::Phi1General, k), -1e-7);
        EXPECT_GE(check_drift_bound(r.profile, r.alg_speeds, r.opp_speeds, DriftBound::Phi2General, k), -1e-7);
      }
    }
  }
}

TEST(DriftBound, RejectsRegimeMismatch) {
  const PotentialConstants k = srpt_comparator_constants(kQuadratic);
  const ProfileAtTime p{{1.0, 2.0}, {1.0, 2.0}, 1, kQuadratic};
  // Algorithm runs the longer job.
  EXPECT_THROW(check_drift_bound(p, {0.0, std::sqrt(2.0)}, {1.0, 0.0}, DriftBound::Phi1Srpt, k),
               std::invalid_argument);
  // Comparator runs the longer job under an SRPT bound.
  EXPECT_THROW(check_drift_bound(p, {std::sqrt(2.0), 0.0}, {0.0, 1.0}, DriftBound::Phi1Srpt, k),
               std::invalid_argument);
  // General bounds need 1 < alpha < 2.
  EXPECT_THROW(check_drift_bound(p, {std::sqrt(2.0), 0.0}, {1.0, 0.0}, DriftBound::Phi1General, k),
               std::invalid_argument);
}

}  // namespace
}  // namespace speedscale
