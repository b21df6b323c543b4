#include "speedscale/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "speedscale/errors.hpp"
#include "speedscale/numerics.hpp"
#include "speedscale/simulator.hpp"

namespace speedscale::harness {

using nlohmann::json;

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string csv_header() { return "family,m,alpha,policy,cost_policy,cost_baseline,baseline_method,ratio"; }

std::string to_csv_row(const RatioRecord& r) {
  return r.family + "," + std::to_string(r.m) + "," + format_number(r.alpha) + "," + r.policy + "," +
         format_number(r.cost_policy) + "," + format_number(r.cost_baseline) + "," + r.baseline_method + "," +
         format_number(r.ratio);
}

std::string to_json(const std::vector<RatioRecord>& records) {
  json out = json::array();
  for (const RatioRecord& r : records) {
    out.push_back({{"family", r.family},
                   {"m", r.m},
                   {"alpha", r.alpha},
                   {"policy", r.policy},
                   {"cost_policy", r.cost_policy},
                   {"cost_baseline", r.cost_baseline},
                   {"baseline_method", r.baseline_method},
                   {"exact_baseline", r.exact_baseline},
                   {"ratio", r.ratio}});
  }
  return out.dump(2);
}

Instance random_small_instance(std::mt19937_64& rng, const PowerFunction& power, const RandomInstanceOptions& o) {
  std::uniform_int_distribution<std::size_t> jobs(1, o.max_jobs);
  std::uniform_int_distribution<std::size_t> servers(1, o.max_servers);
  std::uniform_real_distribution<double> size(o.min_size, o.max_size);
  std::uniform_real_distribution<double> arrival(0.0, o.max_arrival);
  std::bernoulli_distribution burst(o.burst_probability);
  const std::size_t J = jobs(rng);
  const std::size_t m = servers(rng);
  const bool is_burst = burst(rng);
  std::vector<std::pair<double, double>> arrivals;
  for (std::size_t j = 0; j < J; ++j) {
    const double a = is_burst ? 0.0 : arrival(rng);
    const double w = o.unit_sizes ? 1.0 : size(rng);
    arrivals.emplace_back(a, w);
  }
  return Instance::from_arrivals(m, power, arrivals);
}

BaselineChoice parse_baseline_choice(const std::string& name) {
  if (name == "brute") return BaselineChoice::BruteForce;
  if (name == "burst") return BaselineChoice::Burst;
  if (name == "analytic") return BaselineChoice::Analytic;
  throw std::invalid_argument("unknown baseline '" + name + "' (expected brute, burst or analytic)");
}

Baseline compute_baseline(const Instance& instance, BaselineChoice choice, const BruteForceLimits& limits) {
  Baseline b;
  const auto analytic = [&](std::string note) {
    b.cost = isolated_job_lower_bound(instance);
    b.method = BaselineMethod::AnalyticLowerBound;
    b.exact = false;
    b.note = std::move(note);
    return b;
  };
  switch (choice) {
    case BaselineChoice::Analytic:
      return analytic("");
    case BaselineChoice::Burst:
      if (!instance.single_burst()) return analytic("instance is not a single burst; using isolated-job lower bound");
      if (instance.servers() == 1) {
        std::vector<double> sizes;
        for (const Job& j : instance.jobs()) sizes.push_back(j.size);
        b.cost = burst_opt_cost(sizes, instance.power());
        b.method = BaselineMethod::ClosedForm;
        b.exact = true;
        return b;
      }
      [[fallthrough]];
    case BaselineChoice::BruteForce:
      try {
        const OfflineResult r = brute_force_opt(instance, limits);
        b.cost = r.cost;
        b.method = r.method;
        b.exact = r.exact;
        return b;
      } catch (const LimitExceeded& e) {
        return analytic(std::string(e.what()) + "; using isolated-job lower bound");
      }
  }
  return b;
}

CompareResult compare(const Instance& instance, const std::string& tag, const std::vector<PolicyConfig>& policies,
                      BaselineChoice choice) {
  CompareResult result;
  result.srpt_ceiling = srpt_ratio_ceiling(instance.power(), instance.servers());
  if (instance.empty()) return result;
  const Baseline baseline = compute_baseline(instance, choice);
  if (!baseline.note.empty()) result.warnings.push_back(baseline.note);
  for (const PolicyConfig& config : policies) {
    auto policy = make_policy(config);
    double cost = 0.0;
    try {
      SimulationOptions options;
      options.record_trajectory = false;
      cost = simulate(instance, *policy, options).cost.total;
    } catch (const PolicyError& e) {
      result.warnings.push_back(policy->name() + " skipped: " + e.what());
      continue;
    }
    RatioRecord r{tag,  instance.servers(), instance.power().alpha(), policy->name(), cost, baseline.cost,
                  to_string(baseline.method), cost / baseline.cost, baseline.exact};
    if (config.kind == PolicyKind::SrptSpeedScaling && baseline.exact && r.ratio > result.srpt_ceiling + 1e-6) {
      result.within_ceiling = false;
    }
    result.records.push_back(r);
  }
  return result;
}

std::string to_string(AdversaryFamily family) {
  switch (family) {
    case AdversaryFamily::LeastWorkload:
      return "least-workload";
    case AdversaryFamily::JoinShortestQueue:
      return "jsq";
    case AdversaryFamily::NonmigratorySrpt:
      return "nonmigratory-srpt";
  }
  return "unknown";
}

AdversaryFamily parse_adversary_family(const std::string& name) {
  for (AdversaryFamily f :
       {AdversaryFamily::LeastWorkload, AdversaryFamily::JoinShortestQueue, AdversaryFamily::NonmigratorySrpt}) {
    if (name == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown adversary family '" + name +
                              "' (expected least-workload, jsq or nonmigratory-srpt)");
}

Partition route_without_progress(const Instance& instance, Policy& policy) {
  policy.reset(instance);
  SystemState state;
  state.servers = instance.servers();
  state.power = instance.power();
  Partition out(instance.servers());
  for (const Job& job : instance.jobs()) {
    state.time = job.arrival;
    const auto server = policy.route(state, job);
    if (!server || *server >= instance.servers()) {
      throw PolicyError(policy.name() + " does not dispatch on arrival");
    }
    state.active.push_back(ActiveJob{job.id, job.arrival, job.size, job.size, server, std::nullopt});
    out[*server].push_back(job.size);
  }
  return out;
}

Partition alternative_partition(AdversaryFamily family, std::size_t m, double w) {
  Partition out(m);
  switch (family) {
    case AdversaryFamily::LeastWorkload: {
      // Large jobs on m-1 servers as before; the w unit jobs spread evenly.
      const auto units = static_cast<std::size_t>(std::llround(w));
      for (std::size_t k = 0; k + 1 < m; ++k) out[k].push_back(w);
      for (std::size_t u = 0; u < units; ++u) out[u % m].push_back(1.0);
      break;
    }
    case AdversaryFamily::JoinShortestQueue:
      for (std::size_t k = 0; k < m; ++k) {
        out[k].push_back(w);
        out[k].insert(out[k].end(), m - 1, 1.0);
      }
      break;
    case AdversaryFamily::NonmigratorySrpt: {
      const double eps = 1e-3 * w;
      for (std::size_t k = 0; k < m; ++k) {
        out[k].push_back(w - static_cast<double>(k) * eps);
        if (k + 1 < m) out[k].push_back(1.0);
      }
      break;
    }
  }
  return out;
}

double partition_cost(const Partition& partition, const PowerFunction& power) {
  double total = 0.0;
  for (const auto& sizes : partition) total += burst_opt_cost(sizes, power);
  return total;
}

std::vector<RatioRecord> SweepResult::records() const {
  std::vector<RatioRecord> out;
  for (const SweepPoint& p : points) {
    out.push_back(RatioRecord{to_string(family), p.m, alpha, policy, p.cost_greedy, p.cost_alternative,
                              to_string(BaselineMethod::ClosedForm), p.ratio, true});
  }
  return out;
}

SweepResult adversarial_sweep(AdversaryFamily family, const std::vector<std::size_t>& m_grid, double d,
                              const PowerFunction& power) {
  if (m_grid.empty()) throw std::invalid_argument("m grid is empty");
  SweepResult result;
  result.family = family;
  result.alpha = power.alpha();
  result.d = d;
  for (std::size_t m : m_grid) {
    if (m < 2) throw std::invalid_argument("adversarial families need m >= 2");
    const double w = std::pow(static_cast<double>(m), d);
    std::unique_ptr<Policy> policy;
    Instance instance(1, power);
    switch (family) {
      case AdversaryFamily::LeastWorkload:
        instance = gen_least_workload_adversary(m, std::llround(w), power);
        policy = std::make_unique<GreedyLeastWorkload>();
        break;
      case AdversaryFamily::JoinShortestQueue:
        instance = gen_jsq_adversary(m, w, power);
        policy = std::make_unique<JoinShortestQueue>();
        break;
      case AdversaryFamily::NonmigratorySrpt:
        instance = gen_nonmigratory_srpt_adversary(m, w, -1.0, power);
        policy = std::make_unique<NonmigratorySrpt>();
        break;
    }
    result.policy = policy->name();
    SweepPoint p;
    p.m = m;
    p.w = w;
    p.cost_greedy = partition_cost(route_without_progress(instance, *policy), power);
    p.cost_alternative = partition_cost(alternative_partition(family, m, w), power);
    p.ratio = p.cost_greedy / p.cost_alternative;
    if (!result.points.empty() && !(p.ratio > result.points.back().ratio)) result.strictly_increasing = false;
    result.points.push_back(p);
  }
  if (!result.strictly_increasing) {
    result.warnings.push_back("ratio is not increasing in m; d = " + format_number(d) + " may be too small");
  }
  if (result.points.size() >= 2) {
    std::vector<double> x;
    std::vector<double> y;
    for (const SweepPoint& p : result.points) {
      x.push_back(std::log(static_cast<double>(p.m)));
      y.push_back(std::log(p.ratio));
    }
    result.slope = numerics::least_squares(x, y).slope;
  }
  return result;
}

StochasticResult run_stochastic(const StochasticConfig& config) {
  const StochasticSpec& spec = config.spec;
  if (!(spec.horizon > 0.0)) throw std::invalid_argument("stochastic run needs a positive horizon");
  const double mean_size = mean(spec.size_dist);
  StochasticResult r;
  r.load = spec.load();
  r.speed = config.speed ? *config.speed : gated_static_optimum(r.load, config.m, mean_size, config.power).speed;
  if (!(r.speed > r.load / static_cast<double>(config.m))) {
    throw std::invalid_argument("gated speed " + format_number(r.speed) + " does not exceed the per-server load " +
                                format_number(r.load / static_cast<double>(config.m)));
  }

  const StochasticInstance generated = gen_stochastic(spec, config.m, config.power);
  r.jobs = generated.instance.size();
  // Routing randomness is decoupled from the arrival stream.
  RandomGatedStatic policy(r.speed, spec.seed ^ 0x9e3779b97f4a7c15ULL);

  const double w0 = config.warmup_fraction * spec.horizon;
  const double w1 = spec.horizon;
  double window_cost = 0.0;
  // Regeneration cycles start whenever a job arrives to an empty system.
  std::vector<double> cycle_cost;
  std::vector<double> cycle_length;
  double cycle_start = -1.0;
  double current_cost = 0.0;
  bool previous_idle = true;

  SimulationOptions options;
  options.record_trajectory = false;
  options.on_segment = [&](double start, double end, std::size_t n, double power) {
    const double lo = std::max(start, w0);
    const double hi = std::min(end, w1);
    if (hi > lo) window_cost += (static_cast<double>(n) + power) * (hi - lo);
    if (n > 0 && previous_idle) {
      if (cycle_start >= w0 && start <= w1) {
        cycle_cost.push_back(current_cost);
        cycle_length.push_back(start - cycle_start);
      }
      cycle_start = start;
      current_cost = 0.0;
    }
    current_cost += (static_cast<double>(n) + power) * (end - start);
    previous_idle = n == 0;
  };
  simulate(generated.instance, policy, options);

  r.measured_rate = window_cost / (w1 - w0);
  r.cycles = cycle_cost.size();
  if (r.cycles >= 2) {
    const double total_cost = std::accumulate(cycle_cost.begin(), cycle_cost.end(), 0.0);
    const double total_length = std::accumulate(cycle_length.begin(), cycle_length.end(), 0.0);
    const double rate = total_cost / total_length;
    double ss = 0.0;
    for (std::size_t i = 0; i < r.cycles; ++i) {
      const double dev = cycle_cost[i] - rate * cycle_length[i];
      ss += dev * dev;
    }
    const auto n = static_cast<double>(r.cycles);
    r.standard_error = std::sqrt(ss / (n - 1.0) * n) / total_length;
  } else {
    r.standard_error = std::numeric_limits<double>::infinity();
  }
  r.low_confidence = r.cycles < config.min_cycles;

  r.predicted_rate = spec.lambda * gated_static_cost(r.speed, r.load, config.m, mean_size, config.power);
  r.lower_bound = stochastic_lower_bound(r.load, config.m, config.power);
  r.ratio = r.measured_rate / r.lower_bound;
  r.ratio_error = r.standard_error / r.lower_bound;
  const double a = config.power.alpha();
  if (config.power.coefficient() != 1.0) {
    r.ratio_ceiling = std::numeric_limits<double>::quiet_NaN();
  } else if (a == 2.0) {
    r.ratio_ceiling = 2.0;
  } else {
    r.ratio_ceiling = (1.0 + std::pow(2.0, a - 1.0)) / std::min(1.0, burst_constant(config.power));
  }
  return r;
}

std::string to_json(const StochasticResult& r) {
  json doc = {{"load", r.load},
              {"speed", r.speed},
              {"jobs", r.jobs},
              {"measured_rate", r.measured_rate},
              {"standard_error", finite_or_null(r.standard_error)},
              {"cycles", r.cycles},
              {"low_confidence", r.low_confidence},
              {"predicted_rate", r.predicted_rate},
              {"lower_bound", r.lower_bound},
              {"ratio", r.ratio},
              {"ratio_error", finite_or_null(r.ratio_error)},
              {"ratio_ceiling", finite_or_null(r.ratio_ceiling)}};
  return doc.dump(2);
}

ConstantsPreset parse_constants_preset(const std::string& name) {
  if (name == "srpt") return ConstantsPreset::SrptComparator;
  if (name == "general") return ConstantsPreset::GeneralComparator;
  throw std::invalid_argument("unknown constants preset '" + name + "' (expected srpt or general)");
}

std::string to_string(ConstantsPreset preset) {
  return preset == ConstantsPreset::SrptComparator ? "srpt" : "general";
}

PotentialConstants constants_for(ConstantsPreset preset, const PowerFunction& power) {
  return preset == ConstantsPreset::SrptComparator ? srpt_comparator_constants(power)
                                                   : general_comparator_constants(power);
}

DriftRun drift_run(const Instance& instance, ConstantsPreset preset, std::uint64_t seed, std::size_t variant,
                   std::size_t samples_per_interval) {
  DriftRun run;
  run.seed = seed;
  run.jobs = instance.size();
  run.m = instance.servers();
  const PotentialConstants constants = constants_for(preset, instance.power());

  SrptSpeedScaling alg;
  const Trajectory alg_traj = simulate(instance, alg).trajectory;
  Trajectory opp_traj;
  if (preset == ConstantsPreset::GeneralComparator) {
    ArbitraryComparator comparator(1.0, 3.0, seed);
    run.comparator = "arbitrary[1,3]";
    opp_traj = simulate(instance, comparator).trajectory;
  } else {
    std::unique_ptr<SpeedProfile> profile;
    switch (variant % 4) {
      case 0:
        if (!instance.empty() && instance.size() <= BruteForceLimits{}.max_jobs &&
            instance.servers() <= BruteForceLimits{}.max_servers) {
          const OfflineResult opt = brute_force_opt(instance);
          std::vector<double> speeds;
          for (const ScheduledJob& s : opt.schedule) speeds.push_back(s.speed);
          profile = std::make_unique<PerJobSpeeds>(speeds);
          run.comparator = "offline-speeds";
          break;
        }
        [[fallthrough]];
      case 1:
        profile = std::make_unique<ConstantSpeeds>(1.0);
        run.comparator = "constant-1";
        break;
      case 2:
        profile = std::make_unique<ConstantSpeeds>(instance.power().inverse(2.0));
        run.comparator = "constant-P^-1(2)";
        break;
      default:
        profile = std::make_unique<UniformRandomSpeeds>(0.1, 3.0, seed);
        run.comparator = "uniform[0.1,3]";
        break;
    }
    opp_traj = os_comparator(instance, *profile);
  }
  run.drift = check_drift(alg_traj, opp_traj, instance.power(), constants, samples_per_interval);
  run.boundary = check_boundary(alg_traj, opp_traj, instance.power(), constants);
  return run;
}

bool DriftAuditResult::boundary_passed(double tolerance) const {
  return max_boundary_phi <= tolerance && max_arrival_jump <= tolerance && max_departure_jump <= tolerance;
}

DriftAuditResult summarize(std::vector<DriftRun> runs) {
  DriftAuditResult r;
  r.runs = std::move(runs);
  r.min_slack = std::numeric_limits<double>::infinity();
  r.min_integrated_slack = std::numeric_limits<double>::infinity();
  for (const DriftRun& run : r.runs) {
    r.min_slack = std::min(r.min_slack, run.drift.min_slack);
    r.min_integrated_slack = std::min(r.min_integrated_slack, run.drift.min_integrated_slack);
    r.max_arrival_jump = std::max(r.max_arrival_jump, run.boundary.max_arrival_jump);
    r.max_departure_jump = std::max(r.max_departure_jump, run.boundary.max_departure_jump);
    r.max_boundary_phi =
        std::max({r.max_boundary_phi, std::abs(run.boundary.phi_start), std::abs(run.boundary.phi_end)});
  }
  return r;
}

DriftAuditResult run_drift_audit(const DriftAuditConfig& config) {
  std::vector<DriftRun> runs;
  for (std::size_t i = 0; i < config.runs; ++i) {
    const std::uint64_t seed = config.seed + i;
    std::mt19937_64 rng(seed);
    const Instance instance = random_small_instance(rng, config.power, config.instances);
    runs.push_back(drift_run(instance, config.preset, seed, i, config.samples_per_interval));
  }
  return summarize(std::move(runs));
}

std::string to_json(const DriftAuditResult& r) {
  json runs = json::array();
  for (const DriftRun& run : r.runs) {
    runs.push_back({{"seed", run.seed},
                    {"jobs", run.jobs},
                    {"m", run.m},
                    {"comparator", run.comparator},
                    {"min_slack", finite_or_null(run.drift.min_slack)},
                    {"min_integrated_slack", finite_or_null(run.drift.min_integrated_slack)},
                    {"phi_start", run.boundary.phi_start},
                    {"phi_end", run.boundary.phi_end},
                    {"max_arrival_jump", run.boundary.max_arrival_jump},
                    {"max_departure_jump", run.boundary.max_departure_jump}});
  }
  json doc = {{"min_slack", finite_or_null(r.min_slack)},
              {"min_integrated_slack", finite_or_null(r.min_integrated_slack)},
              {"max_arrival_jump", r.max_arrival_jump},
              {"max_departure_jump", r.max_departure_jump},
              {"max_boundary_phi", r.max_boundary_phi},
              {"drift_passed", r.drift_passed()},
              {"boundary_passed", r.boundary_passed()},
              {"runs", runs}};
  return doc.dump(2);
}

}  // namespace speedscale::harness
