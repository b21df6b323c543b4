#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "speedscale/errors.hpp"
#include "speedscale/workload.hpp"

namespace speedscale {
namespace {

const PowerFunction kQuadratic(2.0);

std::vector<double> sizes_of(const Instance& instance) {
  std::vector<double> out;
  for (const Job& j : instance.jobs()) out.push_back(j.size);
  return out;
}

TEST(Instance, SortsByArrivalAndAssignsIds) {
  const Instance inst = Instance::from_arrivals(2, kQuadratic, {{1.0, 3.0}, {0.0, 2.0}});
  ASSERT_EQ(inst.size(), 2u);
  EXPECT_EQ(inst.jobs()[0].arrival, 0.0);
  EXPECT_EQ(inst.jobs()[0].id, 0u);
  EXPECT_EQ(inst.jobs()[1].id, 1u);
  EXPECT_DOUBLE_EQ(inst.total_work(), 5.0);
  EXPECT_FALSE(inst.single_burst());
}

TEST(Instance, RejectsInvalidJobs) {
  EXPECT_THROW(Instance::from_arrivals(0, kQuadratic, {{0.0, 1.0}}), InvalidInstance);
  EXPECT_THROW(Instance::from_arrivals(1, kQuadratic, {{0.0, 0.0}}), InvalidInstance);
  EXPECT_THROW(Instance::from_arrivals(1, kQuadratic, {{-1.0, 1.0}}), InvalidInstance);
  EXPECT_THROW(Instance::from_arrivals(1, kQuadratic, {{0.0, NAN}}), InvalidInstance);
}

TEST(LeastWorkloadAdversary, LargeJobThenUnitBurst) {
  const Instance inst = gen_least_workload_adversary(2, 4, kQuadratic);
  ASSERT_EQ(inst.size(), 5u);
  EXPECT_EQ(inst.jobs()[0].size, 4.0);
  EXPECT_EQ(inst.jobs()[0].arrival, 0.0);
  for (std::size_t i = 1; i < 5; ++i) {
    EXPECT_EQ(inst.jobs()[i].size, 1.0);
    EXPECT_GT(inst.jobs()[i].arrival, 0.0);
  }
  const Instance small = gen_least_workload_adversary(3, 1, kQuadratic);
  EXPECT_EQ(sizes_of(small), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(small.jobs()[1].arrival, 0.0);
  EXPECT_GT(small.jobs()[2].arrival, 0.0);
  EXPECT_EQ(gen_least_workload_adversary(2, 16, kQuadratic).size(), 17u);
  EXPECT_THROW(gen_least_workload_adversary(1, 4, kQuadratic), InvalidInstance);
  EXPECT_THROW(gen_least_workload_adversary(2, 0, kQuadratic), InvalidInstance);
}

TEST(JsqAdversary, EveryMthJobIsLarge) {
  const Instance inst = gen_jsq_adversary(2, 8, kQuadratic);
  EXPECT_EQ(sizes_of(inst), (std::vector<double>{1, 8, 1, 8}));
  for (std::size_t i = 1; i < inst.size(); ++i) EXPECT_GT(inst.jobs()[i].arrival, inst.jobs()[i - 1].arrival);
  const Instance three = gen_jsq_adversary(3, 27, kQuadratic);
  ASSERT_EQ(three.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(three.jobs()[i].size, i % 3 == 2 ? 27.0 : 1.0);
  EXPECT_TRUE(gen_jsq_adversary(2, 1, kQuadratic).all_sizes_equal());
}

TEST(NonmigratorySrptAdversary, UnitJobsThenDescendingLargeJobs) {
  const Instance inst = gen_nonmigratory_srpt_adversary(2, 4.0, 0.1, kQuadratic);
  ASSERT_EQ(inst.size(), 3u);
  EXPECT_EQ(inst.jobs()[0].size, 1.0);
  EXPECT_EQ(inst.jobs()[1].size, 4.0);
  EXPECT_NEAR(inst.jobs()[2].size, 3.9, 1e-12);
  const Instance four = gen_nonmigratory_srpt_adversary(4, 256.0, 0.01, kQuadratic);
  ASSERT_EQ(four.size(), 7u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(four.jobs()[i].size, 1.0);
  for (std::size_t i = 4; i < 7; ++i) EXPECT_LT(four.jobs()[i].size, four.jobs()[i - 1].size);
  EXPECT_THROW(gen_nonmigratory_srpt_adversary(2, 0.2, 0.1, kQuadratic), InvalidInstance);
}

TEST(Stochastic, ZeroHorizonIsEmpty) {
  StochasticSpec spec{1.0, DeterministicSize{1.0}, 0.0, 1};
  EXPECT_TRUE(gen_stochastic(spec, 1, kQuadratic).instance.empty());
  spec.horizon = 1e4;
  EXPECT_DOUBLE_EQ(gen_stochastic(spec, 1, kQuadratic).load, 1.0);
  spec.lambda = 0.0;
  EXPECT_THROW(gen_stochastic(spec, 1, kQuadratic), std::invalid_argument);
}

TEST(Stochastic, PoissonCountAndMeanSizeWithinFourSigma) {
  const StochasticSpec spec{2.0, ExponentialSize{1.0}, 1e4, 7};
  const Instance inst = gen_stochastic(spec, 2, kQuadratic).instance;
  const double expected = 2e4;
  EXPECT_NEAR(static_cast<double>(inst.size()), expected, 4.0 * std::sqrt(expected));
  const double mean_size = inst.total_work() / static_cast<double>(inst.size());
  EXPECT_NEAR(mean_size, 1.0, 4.0 / std::sqrt(static_cast<double>(inst.size())));
  for (std::size_t i = 1; i < inst.size(); ++i) EXPECT_GE(inst.jobs()[i].arrival, inst.jobs()[i - 1].arrival);
}

TEST(Stochastic, BoundedParetoStaysInRange) {
  const StochasticSpec spec{1.0, BoundedParetoSize{1.5, 1.0, 10.0}, 1e3, 3};
  const Instance inst = gen_stochastic(spec, 1, kQuadratic).instance;
  ASSERT_FALSE(inst.empty());
  for (const Job& j : inst.jobs()) {
    EXPECT_GE(j.size, 1.0);
    EXPECT_LE(j.size, 10.0);
  }
}

TEST(Serialization, RoundTripsAdversary) {
  const Instance inst = gen_jsq_adversary(2, 8, PowerFunction(2.5, 1.5));
  const LoadedInstance back = parse_instance(dump_instance(inst));
  EXPECT_EQ(back.instance, inst);
  EXPECT_TRUE(back.warnings.empty());
}

TEST(Serialization, RoundTripsThroughFile) {
  const auto path = std::filesystem::temp_directory_path() / "speedscale_roundtrip.json";
  const Instance inst = gen_least_workload_adversary(3, 9, kQuadratic);
  save_instance(inst, path);
  EXPECT_EQ(load_instance(path).instance, inst);
  std::filesystem::remove(path);
  EXPECT_THROW(load_instance(path), ParseError);
}

TEST(Serialization, EmptyJobsIsValid) {
  const LoadedInstance loaded = parse_instance(R"({"m": 2, "power": {"alpha": 2}, "jobs": []})");
  EXPECT_TRUE(loaded.instance.empty());
  EXPECT_EQ(loaded.instance.servers(), 2u);
}

TEST(Serialization, UnsortedArrivalsAreSortedWithWarning) {
  const LoadedInstance loaded = parse_instance(
      R"({"m": 1, "power": {"alpha": 2, "coefficient": 1},
          "jobs": [{"arrival": 3, "size": 1}, {"arrival": 1, "size": 2}]})");
  ASSERT_EQ(loaded.instance.size(), 2u);
  EXPECT_EQ(loaded.instance.jobs()[0].arrival, 1.0);
  EXPECT_EQ(loaded.instance.jobs()[0].size, 2.0);
  EXPECT_EQ(loaded.warnings.size(), 1u);
}

TEST(Serialization, ErrorsCarryLineAndField) {
  try {
    parse_instance("{\n  \"m\": 2,\n  \"power\": {\"alpha\": 2},\n  \"jobs\": [{\"arrival\": 0}]\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  try {
    parse_instance("{\n  \"m\": 2,\n  \"jobs\": [");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_instance(R"({"power": {"alpha": 2}, "jobs": []})");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "m");
  }
  EXPECT_THROW(parse_instance(R"({"m": 1, "power": {"alpha": 0.5}, "jobs": []})"), ParseError);
}

TEST(Serialization, StochasticSpecRoundTrip) {
  const StochasticSpec spec{2.5, BoundedParetoSize{1.2, 0.5, 40.0}, 100.0, 9};
  const StochasticSpec back = parse_stochastic_spec(dump_stochastic_spec(spec));
  EXPECT_EQ(back.lambda, 2.5);
  EXPECT_EQ(back.horizon, 100.0);
  EXPECT_EQ(back.seed, 9u);
  ASSERT_TRUE(std::holds_alternative<BoundedParetoSize>(back.size_dist));
  EXPECT_EQ(std::get<BoundedParetoSize>(back.size_dist).high, 40.0);
  EXPECT_THROW(parse_stochastic_spec(R"({"lambda": 1, "size_dist": {"kind": "weird"}, "horizon": 1})"), ParseError);
}

}  // namespace
}  // namespace speedscale
