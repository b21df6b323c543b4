#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "speedscale/offline.hpp"
#include "speedscale/policies.hpp"
#include "speedscale/potential.hpp"
#include "speedscale/workload.hpp"

namespace speedscale::harness {

/// One row of every ratio table. CSV column order is fixed:
/// family,m,alpha,policy,cost_policy,cost_baseline,baseline_method,ratio
struct RatioRecord {
  std::string family;
  std::size_t m = 1;
  double alpha = 2.0;
  std::string policy;
  double cost_policy = 0.0;
  double cost_baseline = 0.0;
  std::string baseline_method;
  double ratio = 0.0;
  bool exact_baseline = false;
};

std::string csv_header();
std::string to_csv_row(const RatioRecord& record);
std::string to_json(const std::vector<RatioRecord>& records);

// --- random audit instances ------------------------------------------------

struct RandomInstanceOptions {
  std::size_t max_jobs = 5;
  std::size_t max_servers = 3;
  bool unit_sizes = false;
  double burst_probability = 0.5;
  double max_arrival = 4.0;
  double min_size = 0.2;
  double max_size = 5.0;
};

/// Small instance with 1..max_jobs jobs on 1..max_servers servers; all jobs
/// arrive at 0 with probability burst_probability.
Instance random_small_instance(std::mt19937_64& rng, const PowerFunction& power,
                               const RandomInstanceOptions& options = {});

// --- compare -----------------------------------------------------------------

enum class BaselineChoice { BruteForce, Burst, Analytic };
BaselineChoice parse_baseline_choice(const std::string& name);

struct Baseline {
  double cost = 0.0;
  BaselineMethod method = BaselineMethod::AnalyticLowerBound;
  bool exact = false;
  std::string note;  // set when the requested baseline was replaced
};

/// Requested baseline, falling back to the isolated-job lower bound when the
/// instance is out of reach of the requested method.
Baseline compute_baseline(const Instance& instance, BaselineChoice choice, const BruteForceLimits& limits = {});

struct CompareResult {
  std::vector<RatioRecord> records;
  std::vector<std::string> warnings;
  double srpt_ceiling = 0.0;
  /// False when an SRPT speed-scaling ratio against an exact baseline
  /// exceeds the ceiling.
  bool within_ceiling = true;
};

CompareResult compare(const Instance& instance, const std::string& tag, const std::vector<PolicyConfig>& policies,
                      BaselineChoice choice);

// --- adversarial sweep ---------------------------------------------------------

enum class AdversaryFamily { LeastWorkload, JoinShortestQueue, NonmigratorySrpt };
std::string to_string(AdversaryFamily family);
/// "least-workload", "jsq" or "nonmigratory-srpt".
AdversaryFamily parse_adversary_family(const std::string& name);

using Partition = std::vector<std::vector<double>>;  // job sizes per server

/// Routes the jobs of `instance` through `policy` as if no work were done
/// between arrivals, and returns the sizes dispatched to each server.
Partition route_without_progress(const Instance& instance, Policy& policy);

/// The dispatch each family's greedy rule should have used instead: work
/// spread evenly, with no pile of jobs on any one server.
Partition alternative_partition(AdversaryFamily family, std::size_t m, double w);

/// Sum of the single-server burst optima: the least cost of serving each
/// server's jobs as a burst, whatever the speeds.
double partition_cost(const Partition& partition, const PowerFunction& power);

struct SweepPoint {
  std::size_t m = 0;
  double w = 0.0;
  double cost_greedy = 0.0;
  double cost_alternative = 0.0;
  double ratio = 0.0;
};

struct SweepResult {
  AdversaryFamily family = AdversaryFamily::LeastWorkload;
  double alpha = 2.0;
  double d = 4.0;
  std::string policy;
  std::vector<SweepPoint> points;
  std::optional<double> slope;  // least-squares slope of log ratio vs log m
  bool strictly_increasing = true;
  std::vector<std::string> warnings;

  std::vector<RatioRecord> records() const;
};

/// w = m^d for each m in the grid (all m >= 2).
SweepResult adversarial_sweep(AdversaryFamily family, const std::vector<std::size_t>& m_grid, double d,
                              const PowerFunction& power);

// --- stochastic ----------------------------------------------------------------

struct StochasticConfig {
  StochasticSpec spec;
  std::size_t m = 1;
  PowerFunction power{2.0};
  double warmup_fraction = 0.1;
  std::optional<double> speed;  // defaults to the gated-static optimum
  std::size_t min_cycles = 30;
};

struct StochasticResult {
  double load = 0.0;
  double speed = 0.0;
  std::size_t jobs = 0;
  double measured_rate = 0.0;   // time-average cost rate lambda * C on the window
  double standard_error = 0.0;  // of measured_rate, from regeneration cycles
  std::size_t cycles = 0;
  bool low_confidence = false;
  double predicted_rate = 0.0;  // lambda * per-job cost from the closed form
  double lower_bound = 0.0;
  double ratio = 0.0;
  double ratio_error = 0.0;
  /// Guaranteed ratio for P(s) = s^alpha: 2 at alpha = 2, otherwise
  /// (1 + 2^{alpha-1}) / min(1, alpha (alpha-1)^{1/alpha - 1}). NaN for c != 1.
  double ratio_ceiling = 0.0;
};

/// Simulates random routing with gated-static processor sharing. Throws
/// std::invalid_argument for a nonpositive horizon or an unstable speed.
StochasticResult run_stochastic(const StochasticConfig& config);
std::string to_json(const StochasticResult& result);

// --- drift audit ---------------------------------------------------------------

enum class ConstantsPreset { SrptComparator, GeneralComparator };
/// "srpt" or "general".
ConstantsPreset parse_constants_preset(const std::string& name);
std::string to_string(ConstantsPreset preset);
PotentialConstants constants_for(ConstantsPreset preset, const PowerFunction& power);

struct DriftRun {
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  std::size_t m = 1;
  std::string comparator;
  DriftReport drift;
  BoundaryReport boundary;
};

/// Runs SRPT speed scaling and a comparator on `instance` and checks the drift
/// inequality and boundary behaviour. With the SRPT preset the comparator is
/// SRPT-disciplined and its speeds cycle (by `variant`) through offline-optimal
/// per-job speeds, 1, P^{-1}(2) and uniform draws in [0.1, 3]; with the general
/// preset it serves random subsets at speeds in [1, 3].
DriftRun drift_run(const Instance& instance, ConstantsPreset preset, std::uint64_t seed, std::size_t variant,
                   std::size_t samples_per_interval = 4);

struct DriftAuditConfig {
  PowerFunction power{2.0};
  ConstantsPreset preset = ConstantsPreset::SrptComparator;
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  RandomInstanceOptions instances;
  std::size_t samples_per_interval = 4;
};

struct DriftAuditResult {
  std::vector<DriftRun> runs;
  double min_slack = 0.0;
  double min_integrated_slack = 0.0;
  double max_arrival_jump = 0.0;
  double max_departure_jump = 0.0;
  double max_boundary_phi = 0.0;

  bool drift_passed(double tolerance = 1e-7) const { return min_integrated_slack >= -tolerance; }
  bool boundary_passed(double tolerance = 1e-9) const;
};

DriftAuditResult run_drift_audit(const DriftAuditConfig& config);
DriftAuditResult summarize(std::vector<DriftRun> runs);
std::string to_json(const DriftAuditResult& result);

}  // namespace speedscale::harness
