#include "speedscale/offline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "speedscale/errors.hpp"
#include "speedscale/numerics.hpp"
#include "speedscale/policies.hpp"

namespace speedscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Link { Merged, Gap, Pinned };

// Cost of running jobs back to back in `order` with the given durations,
// each starting at max(arrival, previous completion).
double evaluate_order(const std::vector<Job>& jobs, const std::vector<std::size_t>& order,
                      const std::vector<double>& durations, const PowerFunction& power) {
  const double alpha = power.alpha();
  const double c = power.coefficient();
  double t = 0.0;
  double cost = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Job& j = jobs[order[i]];
    const double start = i == 0 ? j.arrival : std::max(j.arrival, t);
    t = start + durations[i];
    // Energy of w units at speed w/d over time d: c w^alpha d^{1-alpha}.
    cost += (t - j.arrival) + c * std::pow(j.size, alpha) * std::pow(durations[i], 1.0 - alpha);
  }
  return cost;
}

// Stationary durations of a back-to-back chain whose i-th job delays
// weights[i] + mu jobs: d = w (c (alpha-1) / (weight + mu))^{1/alpha}.
void chain_durations(const std::vector<Job>& jobs, const std::vector<std::size_t>& order, std::size_t lo,
                     std::size_t hi, double mu, const PowerFunction& power, std::vector<double>& out) {
  const double k = power.coefficient() * (power.alpha() - 1.0);
  const double inv_alpha = 1.0 / power.alpha();
  for (std::size_t i = lo; i <= hi; ++i) {
    const double weight = static_cast<double>(hi - i + 1) + mu;
    out[i] = jobs[order[i]].size * std::pow(k / weight, inv_alpha);
  }
}

double chain_length(const std::vector<double>& durations, std::size_t lo, std::size_t hi) {
  double total = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) total += durations[i];
  return total;
}

// Best durations for one serving order; returns the cost.
double solve_order(const std::vector<Job>& jobs, const std::vector<std::size_t>& order, const PowerFunction& power,
                   std::vector<double>& best_durations) {
  const std::size_t k = order.size();
  double best = kInf;
  std::vector<Link> links(k > 0 ? k - 1 : 0, Link::Merged);
  std::vector<double> durations(k, 0.0);

  std::function<void(std::size_t)> visit = [&](std::size_t link) {
    if (link < links.size()) {
      for (Link l : {Link::Merged, Link::Gap, Link::Pinned}) {
        links[link] = l;
        visit(link + 1);
      }
      return;
    }
    std::size_t lo = 0;
    while (lo < k) {
      std::size_t hi = lo;
      while (hi + 1 < k && links[hi] == Link::Merged) ++hi;
      const double chain_start = jobs[order[lo]].arrival;
      if (hi + 1 < k && jobs[order[hi + 1]].arrival <= chain_start) return;  // a gap cannot open here
      if (hi + 1 < k && links[hi] == Link::Pinned) {
        const double target = jobs[order[hi + 1]].arrival - chain_start;
        // Chain length falls monotonically in mu on (-1, inf).
        auto excess = [&](double mu) {
          chain_durations(jobs, order, lo, hi, mu, power, durations);
          return chain_length(durations, lo, hi) - target;
        };
        double lo_mu = -1.0 + 1e-12;
        double hi_mu = 1.0;
        while (excess(hi_mu) > 0.0 && hi_mu < 1e15) hi_mu *= 2.0;
        if (excess(lo_mu) < 0.0 || excess(hi_mu) > 0.0) return;
        const double mu = numerics::bisect_root(excess, lo_mu, hi_mu, 120);
        chain_durations(jobs, order, lo, hi, mu, power, durations);
      } else {
        chain_durations(jobs, order, lo, hi, 0.0, power, durations);
      }
      lo = hi + 1;
    }
    const double cost = evaluate_order(jobs, order, durations, power);
    if (cost < best) {
      best = cost;
      best_durations = durations;
    }
  };
  visit(0);
  return best;
}

}  // namespace

double burst_constant(const PowerFunction& power) {
  const double a = power.alpha();
  return a * std::pow(a - 1.0, 1.0 / a - 1.0) * std::pow(power.coefficient(), 1.0 / a);
}

double burst_opt_cost(std::vector<double> sizes, const PowerFunction& power) {
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  const double e = 1.0 - 1.0 / power.alpha();
  double total = 0.0;
  for (std::size_t k = 0; k < sizes.size(); ++k) total += sizes[k] * std::pow(static_cast<double>(k + 1), e);
  return burst_constant(power) * total;
}

double burst_position_speed(std::size_t k, const PowerFunction& power) {
  return std::pow(static_cast<double>(k) / (power.coefficient() * (power.alpha() - 1.0)), 1.0 / power.alpha());
}

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::ClosedForm:
      return "closed-form";
    case BaselineMethod::Enumeration:
      return "enumeration";
    case BaselineMethod::ConvexSpeedOpt:
      return "convex-speed-opt";
    case BaselineMethod::AnalyticLowerBound:
      return "analytic-lower-bound";
  }
  return "unknown";
}

SingleServerSchedule single_server_opt(const std::vector<Job>& jobs, const PowerFunction& power) {
  SingleServerSchedule best;
  if (jobs.empty()) return best;
  best.cost = kInf;
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> durations;
  do {
    const double cost = solve_order(jobs, order, power, durations);
    if (cost < best.cost) {
      best.cost = cost;
      best.order = order;
      best.durations = durations;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

OfflineResult brute_force_opt(const Instance& instance, const BruteForceLimits& limits) {
  OfflineResult result;
  const std::size_t J = instance.size();
  const std::size_t m = instance.servers();
  if (J > limits.max_jobs) {
    throw LimitExceeded("brute force limited to " + std::to_string(limits.max_jobs) + " jobs, instance has " +
                        std::to_string(J));
  }
  if (m > limits.max_servers) {
    throw LimitExceeded("brute force limited to " + std::to_string(limits.max_servers) + " servers, instance has " +
                        std::to_string(m));
  }
  if (J == 0) return result;

  const bool burst = instance.single_burst();
  result.exact = burst;
  result.method = burst ? (m == 1 ? BaselineMethod::ClosedForm : BaselineMethod::Enumeration)
                        : BaselineMethod::ConvexSpeedOpt;

  const std::vector<Job>& jobs = instance.jobs();
  const std::size_t full = (std::size_t{1} << J) - 1;
  std::vector<SingleServerSchedule> per_subset(full + 1);
  std::vector<std::vector<Job>> subset_jobs(full + 1);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (std::size_t i = 0; i < J; ++i) {
      if (mask & (std::size_t{1} << i)) subset_jobs[mask].push_back(jobs[i]);
    }
    per_subset[mask] = single_server_opt(subset_jobs[mask], instance.power());
  }

  // best[s][mask]: least cost of `mask` on s servers; choice records the block
  // holding the lowest job of `mask`.
  std::vector<std::vector<double>> best(m + 1, std::vector<double>(full + 1, kInf));
  std::vector<std::vector<std::size_t>> choice(m + 1, std::vector<std::size_t>(full + 1, 0));
  best[0][0] = 0.0;
  for (std::size_t s = 1; s <= m; ++s) {
    best[s][0] = 0.0;
    for (std::size_t mask = 1; mask <= full; ++mask) {
      const std::size_t low = mask & (~mask + 1);
      for (std::size_t sub = mask; sub > 0; sub = (sub - 1) & mask) {
        if (!(sub & low)) continue;
        const double cost = per_subset[sub].cost + best[s - 1][mask ^ sub];
        if (cost < best[s][mask]) {
          best[s][mask] = cost;
          choice[s][mask] = sub;
        }
      }
    }
  }
  result.cost = best[m][full];

  result.schedule.assign(J, ScheduledJob{});
  std::size_t mask = full;
  ServerId server = 0;
  for (std::size_t s = m; s > 0 && mask != 0; --s, ++server) {
    const std::size_t sub = choice[s][mask];
    const SingleServerSchedule& sched = per_subset[sub];
    const std::vector<Job>& members = subset_jobs[sub];
    double t = 0.0;
    for (std::size_t p = 0; p < sched.order.size(); ++p) {
      const Job& j = members[sched.order[p]];
      const double start = p == 0 ? j.arrival : std::max(j.arrival, t);
      t = start + sched.durations[p];
      result.schedule[j.id] = ScheduledJob{j.id, server, start, t, j.size / sched.durations[p]};
    }
    mask ^= sub;
  }
  return result;
}

double isolated_job_lower_bound(const Instance& instance) {
  return burst_constant(instance.power()) * instance.total_work();
}

Trajectory schedule_to_trajectory(const Instance& instance, const std::vector<ScheduledJob>& schedule) {
  Trajectory traj;
  traj.servers = instance.servers();
  traj.jobs = instance.jobs();
  if (schedule.size() != instance.size()) throw std::invalid_argument("schedule does not cover the instance");
  std::vector<double> times{0.0};
  for (const Job& j : instance.jobs()) times.push_back(j.arrival);
  for (const ScheduledJob& s : schedule) {
    times.push_back(s.start);
    times.push_back(s.completion);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    Segment seg{times[k], times[k + 1], {}};
    for (const Job& j : instance.jobs()) {
      const ScheduledJob& s = schedule[j.id];
      if (j.arrival > seg.start || s.completion <= seg.start) continue;
      const bool running = s.start <= seg.start;
      const double done = running ? s.speed * (seg.start - s.start) : 0.0;
      seg.jobs.push_back(SegmentJob{j.id, std::max(0.0, j.size - done), running ? s.speed : 0.0,
                                    running ? std::optional<ServerId>(s.server) : std::nullopt});
    }
    traj.segments.push_back(std::move(seg));
  }
  for (const Job& j : instance.jobs()) {
    traj.events.push_back({j.arrival, EventKind::Arrival, j.id});
    traj.events.push_back({schedule[j.id].completion, EventKind::Departure, j.id});
  }
  std::stable_sort(traj.events.begin(), traj.events.end(),
                   [](const TrajectoryEvent& a, const TrajectoryEvent& b) { return a.time < b.time; });
  return traj;
}

std::string offline_result_to_json(const OfflineResult& result) {
  nlohmann::json schedule = nlohmann::json::array();
  for (const ScheduledJob& s : result.schedule) {
    schedule.push_back({{"job", s.id},
                        {"server", s.server},
                        {"start", s.start},
                        {"completion", s.completion},
                        {"speed", s.speed}});
  }
  nlohmann::json doc = {{"cost", result.cost},
                        {"method", to_string(result.method)},
                        {"exact", result.exact},
                        {"schedule", schedule}};
  return doc.dump(2);
}

ConstantSpeeds::ConstantSpeeds(double speed) : speed_(speed) {
  if (!(speed > 0.0)) throw std::invalid_argument("constant speed must be positive");
}

UniformRandomSpeeds::UniformRandomSpeeds(double lo, double hi, std::uint64_t seed)
    : dist_(lo, hi), seed_(seed), rng_(seed) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("speed range must satisfy 0 < lo <= hi");
}

double UniformRandomSpeeds::speed(const SystemState&, std::size_t, const ActiveJob&) { return dist_(rng_); }

PerJobSpeeds::PerJobSpeeds(std::vector<double> speeds) : speeds_(std::move(speeds)) {
  for (double s : speeds_) {
    if (!(s > 0.0)) throw std::invalid_argument("per-job speeds must be positive");
  }
}

double PerJobSpeeds::speed(const SystemState&, std::size_t, const ActiveJob& job) {
  if (job.id >= speeds_.size()) throw std::out_of_range("no speed for job " + std::to_string(job.id));
  return speeds_[job.id];
}

PolicyDecision SrptComparator::decide(const SystemState& state) {
  PolicyDecision decision;
  auto order = by_remaining(state);
  order.resize(std::min(order.size(), state.servers));
  std::vector<bool> taken(state.servers, false);
  std::vector<std::optional<ServerId>> server(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i]->last_server && !taken[*order[i]->last_server]) {
      server[i] = order[i]->last_server;
      taken[*server[i]] = true;
    }
  }
  ServerId next_free = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!server[i]) {
      while (taken[next_free]) ++next_free;
      server[i] = next_free;
      taken[next_free] = true;
    }
    decision.running.push_back({order[i]->id, *server[i], profile_.speed(state, i, *order[i])});
  }
  return decision;
}

ArbitraryComparator::ArbitraryComparator(double lo, double hi, std::uint64_t seed)
    : lo_(lo), hi_(hi), seed_(seed), rng_(seed) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("speed range must satisfy 0 < lo <= hi");
}

PolicyDecision ArbitraryComparator::decide(const SystemState& state) {
  PolicyDecision decision;
  if (state.active.empty()) return decision;
  std::vector<std::size_t> idx(state.active.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng_);
  const std::size_t limit = std::min(state.servers, idx.size());
  const std::size_t count = std::uniform_int_distribution<std::size_t>(1, limit)(rng_);
  std::uniform_real_distribution<double> speed(lo_, hi_);
  for (std::size_t i = 0; i < count; ++i) {
    decision.running.push_back({state.active[idx[i]].id, i, speed(rng_)});
  }
  return decision;
}

Trajectory os_comparator(const Instance& instance, SpeedProfile& profile) {
  SrptComparator comparator(profile);
  return simulate(instance, comparator).trajectory;
}

double stochastic_lower_bound(double load, std::size_t m, const PowerFunction& power) {
  if (!(load > 0.0)) throw std::invalid_argument("load must be positive");
  const double md = static_cast<double>(m);
  const double per_job = load * burst_constant(power);
  const double speed_floor = power.coefficient() * std::pow(load, power.alpha()) / std::pow(md, power.alpha() - 1.0);
  return std::max(per_job, speed_floor);
}

double gated_static_cost(double speed, double load, std::size_t m, double mean_size, const PowerFunction& power) {
  const double per_server = load / static_cast<double>(m);
  if (speed <= per_server) return kInf;
  return mean_size / (speed - per_server) + mean_size * power.eval(speed) / speed;
}

GatedStaticOptimum gated_static_optimum(double load, std::size_t m, double mean_size, const PowerFunction& power) {
  if (!(load > 0.0) || !(mean_size > 0.0) || m == 0) {
    throw std::invalid_argument("gated static optimum needs positive load, mean size and server count");
  }
  const double rho = load / static_cast<double>(m);
  const double a = power.alpha();
  const double c = power.coefficient();
  // Derivative divided by E[X]: -1/(s - rho)^2 + c (alpha - 1) s^{alpha - 2}.
  auto slope = [&](double s) { return -1.0 / ((s - rho) * (s - rho)) + c * (a - 1.0) * std::pow(s, a - 2.0); };
  double hi = rho + 1.0;
  while (slope(hi) <= 0.0) hi = rho + 2.0 * (hi - rho);
  double lo = rho + (hi - rho) * 1e-9;
  while (slope(lo) >= 0.0) lo = rho + (lo - rho) * 1e-3;

  auto cost = [&](double s) { return gated_static_cost(s, load, m, mean_size, power); };
  const auto coarse = numerics::golden_section_minimize(cost, lo, hi, 1e-10);
  // Refine on the derivative sign, which is far better conditioned near the
  // minimum than the cost itself.
  double left = coarse.argmin;
  double right = coarse.argmin;
  double step = 1e-6 * (coarse.argmin - rho);
  while (slope(left) > 0.0) {
    left = std::max(rho + 0.5 * (left - rho), left - step);
    step *= 2.0;
  }
  step = 1e-6 * (coarse.argmin - rho);
  while (slope(right) < 0.0) {
    right += step;
    step *= 2.0;
  }
  const double s = left == right ? left : numerics::bisect_root(slope, left, right);
  return {s, cost(s)};
}

}  // namespace speedscale
