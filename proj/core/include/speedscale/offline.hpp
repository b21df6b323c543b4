#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "speedscale/policy.hpp"
#include "speedscale/power_model.hpp"
#include "speedscale/simulator.hpp"
#include "speedscale/workload.hpp"

namespace speedscale {

/// alpha (alpha-1)^{1/alpha - 1} c^{1/alpha}: the least cost of a lone job of
/// unit size, and the per-position factor of the single-burst optimum.
double burst_constant(const PowerFunction& power);

/// Optimal single-server cost of jobs all released at time 0:
/// burst_constant * sum_k x_k k^{1 - 1/alpha}, with x_1 the largest size.
/// Zero for an empty burst.
double burst_opt_cost(std::vector<double> sizes, const PowerFunction& power);

/// Speed of the job in position k (1 = served last, i.e. the largest) of the
/// optimal burst schedule: the solution of c (alpha - 1) s^alpha = k.
double burst_position_speed(std::size_t k, const PowerFunction& power);

enum class BaselineMethod { ClosedForm, Enumeration, ConvexSpeedOpt, AnalyticLowerBound };

std::string to_string(BaselineMethod method);

struct ScheduledJob {
  JobId id = 0;
  ServerId server = 0;
  double start = 0.0;
  double completion = 0.0;
  double speed = 0.0;
};

struct OfflineResult {
  double cost = 0.0;
  BaselineMethod method = BaselineMethod::ClosedForm;
  /// True when the cost is the optimum over all schedules (single bursts);
  /// otherwise it is the optimum over non-preemptive constant-speed
  /// schedules, an upper bound on the true optimum.
  bool exact = true;
  std::vector<ScheduledJob> schedule;  // indexed by job id
};

struct BruteForceLimits {
  std::size_t max_jobs = 5;
  std::size_t max_servers = 3;
};

struct SingleServerSchedule {
  double cost = 0.0;
  std::vector<std::size_t> order;    // positions into the input vector
  std::vector<double> durations;     // per position in `order`
};

/// Least cost of running `jobs` on one server, each job without interruption
/// at one constant speed, over every serving order. Exact within that class:
/// for each order, every pattern of idle gaps, back-to-back links and links
/// pinned to an arrival is solved in closed form and the cheapest is kept.
SingleServerSchedule single_server_opt(const std::vector<Job>& jobs, const PowerFunction& power);

/// Minimum cost over all job-to-server assignments of the single-server
/// optimum on each server. Throws LimitExceeded beyond `limits`.
OfflineResult brute_force_opt(const Instance& instance, const BruteForceLimits& limits = {});

/// Sum over jobs of the least cost of the job served alone; a lower bound on
/// the cost of any schedule.
double isolated_job_lower_bound(const Instance& instance);

/// Replays a schedule as a trajectory (segments tile [0, makespan]).
Trajectory schedule_to_trajectory(const Instance& instance, const std::vector<ScheduledJob>& schedule);

std::string offline_result_to_json(const OfflineResult& result);

/// Speeds for the jobs served by an SRPT-disciplined comparator.
class SpeedProfile {
 public:
  virtual ~SpeedProfile() = default;
  virtual void reset() {}
  /// Speed for `job`, the rank-th shortest served job (rank 0 = shortest).
  virtual double speed(const SystemState& state, std::size_t rank, const ActiveJob& job) = 0;
};

class ConstantSpeeds : public SpeedProfile {
 public:
  explicit ConstantSpeeds(double speed);
  double speed(const SystemState&, std::size_t, const ActiveJob&) override { return speed_; }

 private:
  double speed_;
};

/// Fresh uniform draw in [lo, hi] for every served job at every decision.
class UniformRandomSpeeds : public SpeedProfile {
 public:
  UniformRandomSpeeds(double lo, double hi, std::uint64_t seed);
  void reset() override { rng_.seed(seed_); }
  double speed(const SystemState&, std::size_t, const ActiveJob&) override;

 private:
  std::uniform_real_distribution<double> dist_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// A fixed speed per job id, e.g. taken from an offline schedule.
class PerJobSpeeds : public SpeedProfile {
 public:
  explicit PerJobSpeeds(std::vector<double> speeds);
  double speed(const SystemState&, std::size_t, const ActiveJob& job) override;

 private:
  std::vector<double> speeds_;
};

/// Serves the min(m, n) jobs of least remaining work at profile speeds.
class SrptComparator : public Policy {
 public:
  explicit SrptComparator(SpeedProfile& profile) : profile_(profile) {}
  std::string name() const override { return "os-comparator"; }
  bool migratory() const override { return true; }
  void reset(const Instance&) override { profile_.reset(); }
  PolicyDecision decide(const SystemState& state) override;

 private:
  SpeedProfile& profile_;
};

/// Serves a random nonempty subset of at most m jobs at uniform random speeds
/// in [lo, hi], redrawn at every decision. No ordering discipline.
class ArbitraryComparator : public Policy {
 public:
  ArbitraryComparator(double lo, double hi, std::uint64_t seed);
  std::string name() const override { return "arbitrary-comparator"; }
  bool migratory() const override { return true; }
  void reset(const Instance&) override { rng_.seed(seed_); }
  PolicyDecision decide(const SystemState& state) override;

 private:
  double lo_;
  double hi_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Trajectory of an SRPT-disciplined comparator running at profile speeds.
Trajectory os_comparator(const Instance& instance, SpeedProfile& profile);

/// max(Lambda * burst_constant, c Lambda^alpha / m^(alpha-1)): a lower bound
/// on lambda times the mean per-job cost of any policy at load Lambda.
double stochastic_lower_bound(double load, std::size_t m, const PowerFunction& power);

/// Mean per-job cost E[X]/(s - Lambda/m) + E[X] P(s)/s of random routing with
/// processor sharing at the fixed busy speed s. Infinite when s <= Lambda/m.
double gated_static_cost(double speed, double load, std::size_t m, double mean_size, const PowerFunction& power);

struct GatedStaticOptimum {
  double speed = 0.0;
  double cost = 0.0;  // per job
};

/// Minimizer of gated_static_cost over s > Lambda/m: golden-section search on
/// a bracket, then bisection on the sign of the derivative.
GatedStaticOptimum gated_static_optimum(double load, std::size_t m, double mean_size, const PowerFunction& power);

}  // namespace speedscale
