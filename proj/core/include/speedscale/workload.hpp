#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "speedscale/power_model.hpp"

namespace speedscale {

using JobId = std::size_t;
using ServerId = std::size_t;

struct Job {
  JobId id = 0;
  double arrival = 0.0;
  double size = 0.0;

  friend bool operator==(const Job&, const Job&) = default;
};

/// An arrival sequence on m identical servers. Jobs are kept sorted by
/// (arrival, id) and ids equal positions in that order.
class Instance {
 public:
  Instance(std::size_t servers, PowerFunction power, std::vector<Job> jobs = {});

  /// Builds an instance from (arrival, size) pairs, assigning ids in arrival
  /// order (stable for equal arrivals).
  static Instance from_arrivals(std::size_t servers, PowerFunction power,
                                const std::vector<std::pair<double, double>>& arrivals);

  std::size_t servers() const { return servers_; }
  const PowerFunction& power() const { return power_; }
  const std::vector<Job>& jobs() const { return jobs_; }
  std::size_t size() const { return jobs_.size(); }
  bool empty() const { return jobs_.empty(); }

  bool all_sizes_equal() const;
  bool single_burst() const;
  double total_work() const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::size_t servers_;
  PowerFunction power_;
  std::vector<Job> jobs_;
};

/// Default spacing used for "quick succession" arrivals in the adversarial
/// families; small enough that no policy finishes work between arrivals.
inline constexpr double kDefaultBurstGap = 1e-6;

/// m-1 jobs of size w at time 0, then w unit jobs at time gap.
Instance gen_least_workload_adversary(std::size_t m, std::int64_t w, const PowerFunction& power,
                                      double gap = kDefaultBurstGap);

/// m^2 jobs at 0, gap, 2 gap, ...; every m-th job has size w, the rest size 1.
Instance gen_jsq_adversary(std::size_t m, double w, const PowerFunction& power,
                           double gap = kDefaultBurstGap);

/// m-1 unit jobs at time 0 followed by jobs of size w, w - eps, ...,
/// w - (m-1) eps at times gap, 2 gap, .... Requires w > m * eps. A negative
/// eps selects the default 1e-3 * w.
Instance gen_nonmigratory_srpt_adversary(std::size_t m, double w, double eps, const PowerFunction& power,
                                         double gap = kDefaultBurstGap);

struct DeterministicSize {
  double value = 1.0;
};
struct ExponentialSize {
  double mean = 1.0;
};
/// Pareto with shape k truncated to [low, high].
struct BoundedParetoSize {
  double shape = 1.5;
  double low = 1.0;
  double high = 100.0;
};
using SizeDistribution = std::variant<DeterministicSize, ExponentialSize, BoundedParetoSize>;

double mean(const SizeDistribution& dist);
std::string describe(const SizeDistribution& dist);

struct StochasticSpec {
  double lambda = 1.0;
  SizeDistribution size_dist = ExponentialSize{};
  double horizon = 0.0;
  std::uint64_t seed = 0;

  /// Offered load lambda * E[X].
  double load() const { return lambda * mean(size_dist); }
};

struct StochasticInstance {
  Instance instance;
  StochasticSpec spec;
  double load;  // lambda * E[X]
};

/// Poisson(lambda) arrivals on [0, horizon] with i.i.d. sizes; bit-identical
/// for a fixed seed. Throws InvalidInstance on nonpositive rate or negative
/// horizon, or an invalid size distribution.
StochasticInstance gen_stochastic(const StochasticSpec& spec, std::size_t m, const PowerFunction& power);

struct LoadedInstance {
  Instance instance;
  std::vector<std::string> warnings;
};

/// Reads the JSON instance format
///   {"m": int, "power": {"alpha": x, "coefficient": y}, "jobs": [{"arrival": a, "size": w}, ...]}
/// Unsorted arrivals are re-sorted with a warning. Throws ParseError.
LoadedInstance load_instance(const std::filesystem::path& path);
LoadedInstance parse_instance(const std::string& text);
void save_instance(const Instance& instance, const std::filesystem::path& path);
std::string dump_instance(const Instance& instance);

/// {"lambda": x, "size_dist": {"kind": ..., ...}, "horizon": h, "seed": n}
StochasticSpec parse_stochastic_spec(const std::string& text);
std::string dump_stochastic_spec(const StochasticSpec& spec);

}  // namespace speedscale
