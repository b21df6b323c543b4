#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "speedscale/numerics.hpp"
#include "speedscale/power_model.hpp"

namespace speedscale {
namespace {

TEST(PowerFunction, EvaluatesPowerLaw) {
  EXPECT_DOUBLE_EQ(PowerFunction(2.0).eval(1.5), 2.25);
  EXPECT_DOUBLE_EQ(PowerFunction(2.0).eval(0.0), 0.0);
  EXPECT_DOUBLE_EQ(PowerFunction(3.0, 2.0).eval(2.0), 16.0);
}

TEST(PowerFunction, RejectsBadParameters) {
  EXPECT_THROW(PowerFunction(1.0), std::invalid_argument);
  EXPECT_THROW(PowerFunction(0.5), std::invalid_argument);
  EXPECT_THROW(PowerFunction(2.0, 0.5), std::invalid_argument);
  EXPECT_THROW(PowerFunction(2.0).eval(-1.0), std::domain_error);
  EXPECT_THROW(PowerFunction(2.0).inverse(-1.0), std::domain_error);
}

TEST(PowerFunction, InverseMatchesBisectionOracle) {
  for (double alpha : {1.3, 2.0, 3.0}) {
    for (double c : {1.0, 2.5}) {
      const PowerFunction p(alpha, c);
      for (double power : {0.1, 1.0, 2.0, 17.0}) {
        const double oracle = numerics::bisect_root([&](double s) { return p.eval(s) - power; }, 0.0, 100.0);
        EXPECT_NEAR(p.inverse(power), oracle, 1e-12) << alpha << " " << c << " " << power;
      }
    }
  }
  EXPECT_NEAR(PowerFunction(2.0).inverse(2.0), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(PowerFunction(2.0).inverse(1.0), 1.0);
  EXPECT_NEAR(PowerFunction(3.0).inverse(8.0), 2.0, 1e-15);
}

TEST(PowerFunction, DeltaMatchesFiniteDifferenceOfPower) {
  for (double alpha : {1.5, 2.0, 3.0}) {
    const PowerFunction p(alpha, 1.7);
    for (double x : {0.25, 0.5, 1.0, 4.0}) {
      const double s = p.inverse(x);
      const double h = 1e-6 * s;
      const double fd = (p.eval(s + h) - p.eval(s - h)) / (2.0 * h);
      EXPECT_NEAR(p.delta(x), fd, 1e-6 * fd);
    }
  }
  const PowerFunction quad(2.0);
  EXPECT_NEAR(quad.delta(0.5), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(quad.delta(4.0), 4.0, 1e-14);
  EXPECT_EQ(quad.delta(-1.0), 0.0);
  EXPECT_EQ(quad.delta(0.0), 0.0);
}

TEST(PowerFunction, SpeedThresholdWherePowerExceedsSpeed) {
  EXPECT_DOUBLE_EQ(PowerFunction(2.0).s_bar(), 1.0);
  EXPECT_DOUBLE_EQ(PowerFunction(3.0).s_bar(), 1.0);
  const PowerFunction p(2.0, 2.0);
  const double oracle = numerics::bisect_root([&](double s) { return p.eval(s) - s; }, 0.1, 10.0);
  EXPECT_NEAR(p.s_bar(), oracle, 1e-12);
  EXPECT_NEAR(p.s_bar(), 0.5, 1e-15);
}

TEST(BansalInequality, HandComputedSlacks) {
  const PowerFunction p(2.0);
  EXPECT_NEAR(check_bansal_inequality(p, 1.0, 2.0, 1.0), 1.0, 1e-14);
  EXPECT_NEAR(check_bansal_inequality(p, 1.0, 1.0, 1.0), 0.0, 1e-14);
  EXPECT_NEAR(check_bansal_inequality(p, 0.0, 0.0, 4.0), 4.0, 1e-14);
  EXPECT_THROW(check_bansal_inequality(p, -1.0, 0.0, 1.0), std::domain_error);
}

TEST(BansalInequality, NonnegativeOnRandomTriples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (double alpha : {1.2, 2.0, 3.0}) {
    const PowerFunction p(alpha, 1.5);
    for (int i = 0; i < 2000; ++i) {
      EXPECT_GE(check_bansal_inequality(p, u(rng), u(rng), u(rng)), -1e-9);
    }
  }
}

}  // namespace
}  // namespace speedscale
