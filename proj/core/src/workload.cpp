#include "speedscale/workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "speedscale/errors.hpp"

namespace speedscale {

Instance::Instance(std::size_t servers, PowerFunction power, std::vector<Job> jobs)
    : servers_(servers), power_(power), jobs_(std::move(jobs)) {
  if (servers_ < 1) throw InvalidInstance("instance needs at least one server");
  for (std::size_t i = 0; i < jobs_.size(); ++i) {
    const Job& j = jobs_[i];
    if (j.id != i) throw InvalidInstance("job ids must equal their position in arrival order");
    if (!(j.size > 0.0) || !std::isfinite(j.size)) {
      throw InvalidInstance("job " + std::to_string(i) + " has nonpositive size");
    }
    if (!(j.arrival >= 0.0) || !std::isfinite(j.arrival)) {
      throw InvalidInstance("job " + std::to_string(i) + " has negative arrival time");
    }
    if (i > 0 && j.arrival < jobs_[i - 1].arrival) {
      throw InvalidInstance("jobs must be sorted by arrival time");
    }
  }
}

Instance Instance::from_arrivals(std::size_t servers, PowerFunction power,
                                 const std::vector<std::pair<double, double>>& arrivals) {
  std::vector<std::size_t> order(arrivals.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return arrivals[a].first < arrivals[b].first; });
  std::vector<Job> jobs;
  jobs.reserve(arrivals.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    jobs.push_back(Job{k, arrivals[order[k]].first, arrivals[order[k]].second});
  }
  return Instance(servers, power, std::move(jobs));
}

bool Instance::all_sizes_equal() const {
  return std::all_of(jobs_.begin(), jobs_.end(),
                     [&](const Job& j) { return j.size == jobs_.front().size; });
}

bool Instance::single_burst() const {
  return std::all_of(jobs_.begin(), jobs_.end(),
                     [&](const Job& j) { return j.arrival == jobs_.front().arrival; });
}

double Instance::total_work() const {
  double w = 0;
  for (const Job& j : jobs_) w += j.size;
  return w;
}

Instance gen_least_workload_adversary(std::size_t m, std::int64_t w, const PowerFunction& power, double gap) {
  if (m < 2) throw InvalidInstance("least-workload adversary needs m >= 2");
  if (w < 1) throw InvalidInstance("least-workload adversary needs integer w >= 1");
  if (!(gap > 0.0)) throw InvalidInstance("burst gap must be positive");
  std::vector<std::pair<double, double>> arrivals;
  for (std::size_t k = 0; k + 1 < m; ++k) arrivals.emplace_back(0.0, static_cast<double>(w));
  for (std::int64_t k = 0; k < w; ++k) arrivals.emplace_back(gap, 1.0);
  return Instance::from_arrivals(m, power, arrivals);
}

Instance gen_jsq_adversary(std::size_t m, double w, const PowerFunction& power, double gap) {
  if (m < 2) throw InvalidInstance("JSQ adversary needs m >= 2");
  if (!(w >= 1.0)) throw InvalidInstance("JSQ adversary needs w >= 1");
  if (!(gap > 0.0)) throw InvalidInstance("burst gap must be positive");
  std::vector<std::pair<double, double>> arrivals;
  for (std::size_t k = 0; k < m * m; ++k) {
    const bool big = (k + 1) % m == 0;
    arrivals.emplace_back(static_cast<double>(k) * gap, big ? w : 1.0);
  }
  return Instance::from_arrivals(m, power, arrivals);
}

Instance gen_nonmigratory_srpt_adversary(std::size_t m, double w, double eps, const PowerFunction& power,
                                         double gap) {
  if (m < 2) throw InvalidInstance("non-migratory SRPT adversary needs m >= 2");
  if (eps < 0.0) eps = 1e-3 * w;
  if (!(w > static_cast<double>(m) * eps)) {
    throw InvalidInstance("non-migratory SRPT adversary needs w > m * eps");
  }
  if (!(gap > 0.0)) throw InvalidInstance("burst gap must be positive");
  std::vector<std::pair<double, double>> arrivals;
  for (std::size_t k = 0; k + 1 < m; ++k) arrivals.emplace_back(0.0, 1.0);
  for (std::size_t k = 0; k < m; ++k) {
    arrivals.emplace_back(static_cast<double>(k + 1) * gap, w - static_cast<double>(k) * eps);
  }
  return Instance::from_arrivals(m, power, arrivals);
}

namespace {

struct MeanVisitor {
  double operator()(const DeterministicSize& d) const { return d.value; }
  double operator()(const ExponentialSize& e) const { return e.mean; }
  double operator()(const BoundedParetoSize& p) const {
    const double k = p.shape;
    const double l = p.low;
    const double h = p.high;
    const double norm = 1.0 - std::pow(l / h, k);
    if (std::abs(k - 1.0) < 1e-12) return l * std::log(h / l) / norm;
    return (k / (k - 1.0)) * (std::pow(l, k) / norm) * (std::pow(l, 1.0 - k) - std::pow(h, 1.0 - k));
  }
};

void validate(const SizeDistribution& dist) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DeterministicSize>) {
          if (!(d.value > 0)) throw InvalidInstance("deterministic size must be positive");
        } else if constexpr (std::is_same_v<T, ExponentialSize>) {
          if (!(d.mean > 0)) throw InvalidInstance("exponential mean must be positive");
        } else {
          if (!(d.shape > 0) || !(d.low > 0) || !(d.high > d.low)) {
            throw InvalidInstance("bounded Pareto needs shape > 0 and 0 < low < high");
          }
        }
      },
      dist);
}

}  // namespace

double mean(const SizeDistribution& dist) { return std::visit(MeanVisitor{}, dist); }

std::string describe(const SizeDistribution& dist) {
  std::ostringstream os;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DeterministicSize>) {
          os << "deterministic(" << d.value << ")";
        } else if constexpr (std::is_same_v<T, ExponentialSize>) {
          os << "exponential(mean=" << d.mean << ")";
        } else {
          os << "bounded-pareto(shape=" << d.shape << ",low=" << d.low << ",high=" << d.high << ")";
        }
      },
      dist);
  return os.str();
}

StochasticInstance gen_stochastic(const StochasticSpec& spec, std::size_t m, const PowerFunction& power) {
  if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda)) {
    throw InvalidInstance("arrival rate must be positive");
  }
  if (!(spec.horizon >= 0.0) || !std::isfinite(spec.horizon)) {
    throw InvalidInstance("horizon must be nonnegative");
  }
  validate(spec.size_dist);

  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> interarrival(spec.lambda);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto draw_size = [&]() -> double {
    return std::visit(
        [&](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, DeterministicSize>) {
            return d.value;
          } else if constexpr (std::is_same_v<T, ExponentialSize>) {
            // Inverse CDF on (0, 1] so a zero size is impossible.
            return -d.mean * std::log(1.0 - unit(rng));
          } else {
            const double u = unit(rng);
            const double ratio = std::pow(d.low / d.high, d.shape);
            return d.low * std::pow(1.0 - u * (1.0 - ratio), -1.0 / d.shape);
          }
        },
        spec.size_dist);
  };

  std::vector<Job> jobs;
  double t = 0.0;
  while (true) {
    t += interarrival(rng);
    if (t > spec.horizon) break;
    double size = draw_size();
    while (!(size > 0.0)) size = draw_size();
    jobs.push_back(Job{jobs.size(), t, size});
  }
  return StochasticInstance{Instance(m, power, std::move(jobs)), spec, spec.load()};
}

}  // namespace speedscale
