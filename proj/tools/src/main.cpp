#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "speedscale/errors.hpp"
#include "speedscale/harness.hpp"
#include "speedscale/simulator.hpp"

namespace {

using namespace speedscale;

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

// Writes to `path`, or to stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string sibling_json(const std::string& path) {
  if (path.empty()) return "";
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ".json";
  return path.substr(0, dot) + ".json";
}

std::string csv_table(const std::vector<harness::RatioRecord>& records) {
  std::ostringstream out;
  out << harness::csv_header() << '\n';
  for (const auto& r : records) out << harness::to_csv_row(r) << '\n';
  return out.str();
}

Instance with_power(const Instance& instance, std::optional<double> alpha, std::optional<double> coefficient) {
  if (!alpha && !coefficient) return instance;
  const PowerFunction power(alpha.value_or(instance.power().alpha()),
                            coefficient.value_or(instance.power().coefficient()));
  return Instance(instance.servers(), power, instance.jobs());
}

Instance load_with_warnings(const std::string& path) {
  LoadedInstance loaded = load_instance(path);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << path << ": " << w << '\n';
  return loaded.instance;
}

struct SimulateArgs {
  std::string instance;
  std::string policy = "srpt-speedscale";
  std::optional<double> alpha;
  std::optional<double> coefficient;
  std::string out;
  std::string trajectory;
};

int run_simulate(const SimulateArgs& args) {
  const Instance instance = with_power(load_with_warnings(args.instance), args.alpha, args.coefficient);
  auto policy = make_policy(parse_policy_config(args.policy));
  const SimulationResult result = simulate(instance, *policy);
  emit(args.out, cost_to_json(result.cost) + "\n");
  if (!args.trajectory.empty()) {
    std::ofstream out(args.trajectory);
    if (!out) throw std::runtime_error("cannot write " + args.trajectory);
    write_trajectory_jsonl(result.trajectory, out);
  }
  double per_job = 0.0;
  for (double f : result.cost.per_job_flow) per_job += f;
  const double scale = std::max(1.0, result.cost.flow_time);
  if (std::abs(per_job - result.cost.flow_time) > 1e-9 * scale) {
    std::cerr << "flow time mismatch: sum of per-job flows " << per_job << " vs integral " << result.cost.flow_time
              << '\n';
    return kViolation;
  }
  return kPass;
}

struct CompareArgs {
  std::string instance;
  std::vector<std::string> policies;
  std::optional<double> alpha;
  std::optional<double> coefficient;
  std::string baseline = "brute";
  std::string out;
};

int run_compare(const CompareArgs& args) {
  const Instance instance = with_power(load_with_warnings(args.instance), args.alpha, args.coefficient);
  std::vector<PolicyConfig> configs;
  if (args.policies.empty()) {
    for (PolicyKind k : all_policy_kinds()) {
      if (k != PolicyKind::RandomGatedStatic) configs.push_back(PolicyConfig{k});
    }
  } else {
    for (const auto& p : args.policies) configs.push_back(parse_policy_config(p));
  }
  const auto baseline = harness::parse_baseline_choice(args.baseline);
  const std::string tag = std::filesystem::path(args.instance).stem().string();
  const harness::CompareResult result = harness::compare(instance, tag, configs, baseline);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  emit(args.out, csv_table(result.records));
  if (!args.out.empty()) emit(sibling_json(args.out), harness::to_json(result.records) + "\n");
  std::cerr << "srpt-speedscale ratio ceiling: " << result.srpt_ceiling << '\n';
  if (!result.within_ceiling) {
    std::cerr << "srpt-speedscale exceeds its ratio ceiling against an exact baseline\n";
    return kViolation;
  }
  return kPass;
}

struct SweepArgs {
  std::string family;
  std::vector<std::size_t> m_grid{2, 4, 8, 16};
  double d = 4.0;
  double alpha = 2.0;
  double coefficient = 1.0;
  std::string out;
};

int run_sweep(const SweepArgs& args) {
  const PowerFunction power(args.alpha, args.coefficient);
  const auto sweep = harness::adversarial_sweep(harness::parse_adversary_family(args.family), args.m_grid, args.d,
                                                power);
  emit(args.out, csv_table(sweep.records()));
  for (const auto& w : sweep.warnings) std::cerr << "warning: " << w << '\n';
  if (sweep.slope) {
    std::cerr << "fitted log-log slope: " << *sweep.slope << " (reference 1 - 1/alpha = " << 1.0 - 1.0 / args.alpha
              << ")\n";
  }
  if (!args.out.empty()) {
    nlohmann::json doc = {{"family", args.family},
                          {"alpha", args.alpha},
                          {"d", args.d},
                          {"policy", sweep.policy},
                          {"strictly_increasing", sweep.strictly_increasing},
                          {"slope", sweep.slope ? nlohmann::json(*sweep.slope) : nlohmann::json(nullptr)},
                          {"records", nlohmann::json::parse(harness::to_json(sweep.records()))}};
    emit(sibling_json(args.out), doc.dump(2) + "\n");
  }
  return kPass;
}

struct StochasticArgs {
  std::string workload_file;
  double lambda = 1.0;
  std::string size_dist = "exponential";
  double mean_size = 1.0;
  double horizon = 0.0;
  std::uint64_t seed = 1;
  std::size_t m = 1;
  double alpha = 2.0;
  double coefficient = 1.0;
  std::optional<double> speed;
  std::string out;
};

int run_stochastic_cmd(const StochasticArgs& args) {
  harness::StochasticConfig config;
  if (!args.workload_file.empty()) {
    std::ifstream in(args.workload_file);
    if (!in) throw std::invalid_argument("cannot open " + args.workload_file);
    std::stringstream buf;
    buf << in.rdbuf();
    config.spec = parse_stochastic_spec(buf.str());
  } else {
    config.spec.lambda = args.lambda;
    config.spec.horizon = args.horizon;
    config.spec.seed = args.seed;
    if (args.size_dist == "exponential") {
      config.spec.size_dist = ExponentialSize{args.mean_size};
    } else if (args.size_dist == "deterministic") {
      config.spec.size_dist = DeterministicSize{args.mean_size};
    } else {
      throw std::invalid_argument("--size-dist must be exponential or deterministic (use --workload for bounded-pareto)");
    }
  }
  config.m = args.m;
  config.power = PowerFunction(args.alpha, args.coefficient);
  config.speed = args.speed;
  const auto r = harness::run_stochastic(config);
  emit(args.out, harness::to_json(r) + "\n");
  if (r.low_confidence) std::cerr << "warning: only " << r.cycles << " regeneration cycles; low confidence\n";
  if (std::isfinite(r.ratio_ceiling) && r.ratio - 3.0 * r.ratio_error > r.ratio_ceiling) {
    std::cerr << "measured ratio " << r.ratio << " exceeds the ceiling " << r.ratio_ceiling << '\n';
    return kViolation;
  }
  return kPass;
}

struct DriftArgs {
  std::string instance;
  double alpha = 2.0;
  double coefficient = 1.0;
  std::string constants = "srpt";
  std::size_t seeds = 100;
  std::uint64_t seed = 1;
  std::size_t m = 3;
  std::size_t jobs = 5;
  std::string out;
};

int run_drift(const DriftArgs& args) {
  const PowerFunction power(args.alpha, args.coefficient);
  const auto preset = harness::parse_constants_preset(args.constants);
  harness::constants_for(preset, power);  // rejects alpha outside the preset's range
  harness::DriftAuditResult result;
  if (!args.instance.empty()) {
    const Instance instance = with_power(load_with_warnings(args.instance), args.alpha, args.coefficient);
    std::vector<harness::DriftRun> runs;
    for (std::size_t i = 0; i < args.seeds; ++i) {
      runs.push_back(harness::drift_run(instance, preset, args.seed + i, i));
    }
    result = harness::summarize(std::move(runs));
  } else {
    harness::DriftAuditConfig config;
    config.power = power;
    config.preset = preset;
    config.runs = args.seeds;
    config.seed = args.seed;
    config.instances.max_jobs = args.jobs;
    config.instances.max_servers = args.m;
    result = harness::run_drift_audit(config);
  }
  emit(args.out, harness::to_json(result) + "\n");
  std::cerr << "runs: " << result.runs.size() << ", min integrated slack: " << result.min_integrated_slack
            << ", min pointwise slack: " << result.min_slack << '\n';
  return result.drift_passed() && result.boundary_passed() ? kPass : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speed-scaling scheduling simulator and analysis harness"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run one policy on one instance");
  simulate_cmd->add_option("--instance", sim.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--policy", sim.policy, "Policy kind or {\"kind\",\"params\"} JSON");
  simulate_cmd->add_option("--alpha", sim.alpha, "Override the power exponent");
  simulate_cmd->add_option("--coefficient", sim.coefficient, "Override the power coefficient");
  simulate_cmd->add_option("--out", sim.out, "Cost JSON output path (default stdout)");
  simulate_cmd->add_option("--trajectory", sim.trajectory, "Trajectory JSON-lines output path");

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Ratios of several policies against one baseline");
  compare_cmd->add_option("--instance", cmp.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--policy", cmp.policies, "Policy to include (repeatable; default all)");
  compare_cmd->add_option("--alpha", cmp.alpha, "Override the power exponent");
  compare_cmd->add_option("--coefficient", cmp.coefficient, "Override the power coefficient");
  compare_cmd->add_option("--baseline", cmp.baseline, "brute | burst | analytic")
      ->check(CLI::IsMember({"brute", "burst", "analytic"}));
  compare_cmd->add_option("--out", cmp.out, "CSV output path (JSON written alongside)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("adversarial-sweep", "Growth of greedy-dispatch ratios with m");
  sweep_cmd->add_option("--family", sweep.family, "least-workload | jsq | nonmigratory-srpt")
      ->required()
      ->check(CLI::IsMember({"least-workload", "jsq", "nonmigratory-srpt"}));
  sweep_cmd->add_option("--m-grid", sweep.m_grid, "Server counts, comma separated")->delimiter(',');
  sweep_cmd->add_option("--d", sweep.d, "Large-job size exponent: w = m^d");
  sweep_cmd->add_option("--alpha", sweep.alpha, "Power exponent");
  sweep_cmd->add_option("--coefficient", sweep.coefficient, "Power coefficient");
  sweep_cmd->add_option("--out", sweep.out, "CSV output path (JSON written alongside)");

  StochasticArgs sto;
  auto* sto_cmd = app.add_subcommand("stochastic", "Random routing with gated-static speed under Poisson arrivals");
  sto_cmd->add_option("--workload", sto.workload_file, "Stochastic workload JSON (overrides --lambda/--size-dist/--horizon/--seed)");
  sto_cmd->add_option("--lambda", sto.lambda, "Arrival rate");
  sto_cmd->add_option("--size-dist", sto.size_dist, "exponential | deterministic");
  sto_cmd->add_option("--mean-size", sto.mean_size, "Mean job size");
  sto_cmd->add_option("--horizon", sto.horizon, "Arrival horizon");
  sto_cmd->add_option("--seed", sto.seed, "Random seed");
  sto_cmd->add_option("--m", sto.m, "Server count")->check(CLI::PositiveNumber);
  sto_cmd->add_option("--alpha", sto.alpha, "Power exponent");
  sto_cmd->add_option("--coefficient", sto.coefficient, "Power coefficient");
  sto_cmd->add_option("--speed", sto.speed, "Gated speed (default: optimal static speed)");
  sto_cmd->add_option("--out", sto.out, "Result JSON output path (default stdout)");

  DriftArgs drift;
  auto* drift_cmd = app.add_subcommand("drift-check", "Numerical audit of the potential-function drift inequality");
  drift_cmd->add_option("--instance", drift.instance, "Instance JSON file (default: random instances)")
      ->check(CLI::ExistingFile);
  drift_cmd->add_option("--alpha", drift.alpha, "Power exponent");
  drift_cmd->add_option("--coefficient", drift.coefficient, "Power coefficient");
  drift_cmd->add_option("--constants", drift.constants, "srpt | general")
      ->check(CLI::IsMember({"srpt", "general"}));
  drift_cmd->add_option("--seeds", drift.seeds, "Number of seeded runs");
  drift_cmd->add_option("--seed", drift.seed, "First seed");
  drift_cmd->add_option("--m", drift.m, "Largest server count of random instances")->check(CLI::PositiveNumber);
  drift_cmd->add_option("--jobs", drift.jobs, "Largest job count of random instances")->check(CLI::PositiveNumber);
  drift_cmd->add_option("--out", drift.out, "Report JSON output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate_cmd) return run_simulate(sim);
    if (*compare_cmd) return run_compare(cmp);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*sto_cmd) return run_stochastic_cmd(sto);
    if (*drift_cmd) return run_drift(drift);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what();
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  }
  return kUsage;
}
