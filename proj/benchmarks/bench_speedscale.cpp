#include <random>

#include <benchmark/benchmark.h>

#include "speedscale/harness.hpp"
#include "speedscale/offline.hpp"
#include "speedscale/policies.hpp"
#include "speedscale/potential.hpp"
#include "speedscale/simulator.hpp"

namespace {

using namespace speedscale;

Instance poisson_instance(double horizon, std::size_t m) {
  const StochasticSpec spec{0.8 * static_cast<double>(m), ExponentialSize{1.0}, horizon, 42};
  return gen_stochastic(spec, m, PowerFunction(2.0)).instance;
}

void BM_SimulateSrpt(benchmark::State& state) {
  const Instance inst = poisson_instance(static_cast<double>(state.range(0)), 4);
  SimulationOptions opts;
  opts.record_trajectory = false;
  for (auto _ : state) {
    SrptSpeedScaling srpt;
    benchmark::DoNotOptimize(simulate(inst, srpt, opts).cost.total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inst.size()));
}
BENCHMARK(BM_SimulateSrpt)->Arg(1000)->Arg(10000);

void BM_SimulateJsq(benchmark::State& state) {
  const Instance inst = poisson_instance(static_cast<double>(state.range(0)), 4);
  SimulationOptions opts;
  opts.record_trajectory = false;
  for (auto _ : state) {
    JoinShortestQueue jsq;
    benchmark::DoNotOptimize(simulate(inst, jsq, opts).cost.total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(inst.size()));
}
BENCHMARK(BM_SimulateJsq)->Arg(1000)->Arg(10000);

void BM_BruteForceOpt(benchmark::State& state) {
  std::mt19937_64 rng(7);
  harness::RandomInstanceOptions opts;
  opts.burst_probability = 0.0;
  std::vector<Instance> pool;
  while (pool.size() < 16) {
    const Instance inst = harness::random_small_instance(rng, PowerFunction(2.0), opts);
    if (inst.size() == static_cast<std::size_t>(state.range(0))) pool.push_back(inst);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_opt(pool[i++ % pool.size()]).cost);
  }
}
BENCHMARK(BM_BruteForceOpt)->DenseRange(3, 5);

void BM_Phi1(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> size(0.1, 10.0);
  ProfileAtTime p;
  p.m = 8;
  for (int i = 0; i < state.range(0); ++i) {
    p.alg_remaining.push_back(size(rng));
    p.opp_remaining.push_back(size(rng));
  }
  FTable f(p.power, p.m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi1(p, 2.0, f));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Phi1)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_DriftRun(benchmark::State& state) {
  std::mt19937_64 rng(11);
  const Instance inst = harness::random_small_instance(rng, PowerFunction(2.0));
  std::size_t variant = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        harness::drift_run(inst, harness::ConstantsPreset::SrptComparator, 1, variant++).drift.min_slack);
  }
}
BENCHMARK(BM_DriftRun);

void BM_AdversarialSweep(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        harness::adversarial_sweep(harness::AdversaryFamily::JoinShortestQueue, {2, 4, 8}, 4.0, PowerFunction(2.0))
            .slope);
  }
}
BENCHMARK(BM_AdversarialSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
