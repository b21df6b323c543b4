#include "speedscale/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "speedscale/errors.hpp"

namespace speedscale {

const ActiveJob* SystemState::find(JobId id) const {
  auto it = std::lower_bound(active.begin(), active.end(), id,
                             [](const ActiveJob& j, JobId v) { return j.id < v; });
  if (it == active.end() || it->id != id) return nullptr;
  return &*it;
}

std::vector<JobId> queued(const SystemState& state, const PolicyDecision& decision) {
  std::vector<JobId> out;
  for (const ActiveJob& j : state.active) {
    const bool runs = std::any_of(decision.running.begin(), decision.running.end(),
                                  [&](const Allocation& a) { return a.job == j.id; });
    if (!runs) out.push_back(j.id);
  }
  return out;
}

std::optional<std::size_t> Trajectory::segment_at(double t) const {
  if (segments.empty() || t < segments.front().start || t >= segments.back().end) return std::nullopt;
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const Segment& s) { return v < s.start; });
  return static_cast<std::size_t>(std::distance(segments.begin(), it) - 1);
}

double segment_power(const Segment& segment, const PowerFunction& power) {
  std::map<ServerId, double> server_speed;
  for (const SegmentJob& j : segment.jobs) {
    if (j.server && j.speed > 0.0) server_speed[*j.server] += j.speed;
  }
  double total = 0.0;
  for (const auto& [server, speed] : server_speed) total += power.eval(speed);
  return total;
}

namespace {

// Checks a decision against the state and the policy's declared constraints.
// `first_server` records where each job ran first (non-migratory policies).
void validate_decision(const SystemState& state, const PolicyDecision& decision, const Policy& policy,
                       const std::vector<std::optional<ServerId>>& first_server) {
  std::vector<JobId> seen_jobs;
  std::vector<std::size_t> per_server(state.servers, 0);
  for (const Allocation& a : decision.running) {
    const ActiveJob* job = state.find(a.job);
    if (job == nullptr) {
      throw PolicyError(policy.name() + ": decision runs job " + std::to_string(a.job) +
                        " which is not active at t=" + std::to_string(state.time));
    }
    if (a.server >= state.servers) {
      throw PolicyError(policy.name() + ": server index " + std::to_string(a.server) + " out of range");
    }
    if (!(a.speed > 0.0) || !std::isfinite(a.speed)) {
      throw PolicyError(policy.name() + ": running job " + std::to_string(a.job) + " needs a positive speed");
    }
    if (std::find(seen_jobs.begin(), seen_jobs.end(), a.job) != seen_jobs.end()) {
      throw PolicyError(policy.name() + ": job " + std::to_string(a.job) + " is split across servers");
    }
    seen_jobs.push_back(a.job);
    if (++per_server[a.server] > 1 && !policy.shares_servers()) {
      throw PolicyError(policy.name() + ": two jobs assigned to server " + std::to_string(a.server));
    }
    if (!policy.migratory()) {
      if (job->dispatched && *job->dispatched != a.server) {
        throw PolicyError(policy.name() + ": job " + std::to_string(a.job) + " runs away from its dispatch server");
      }
      if (first_server[a.job] && *first_server[a.job] != a.server) {
        throw PolicyError(policy.name() + ": non-migratory policy moved job " + std::to_string(a.job));
      }
    }
  }
}

}  // namespace

SimulationResult simulate(const Instance& instance, Policy& policy, const SimulationOptions& options) {
  SimulationResult result;
  Trajectory& traj = result.trajectory;
  traj.servers = instance.servers();
  traj.jobs = instance.jobs();

  const std::vector<Job>& jobs = instance.jobs();
  const PowerFunction& power = instance.power();
  CostBreakdown& cost = result.cost;
  cost.per_job_flow.assign(jobs.size(), 0.0);

  policy.reset(instance);

  SystemState state;
  state.servers = instance.servers();
  state.power = power;
  state.time = 0.0;

  std::vector<std::optional<ServerId>> first_server(jobs.size());
  std::size_t next_arrival = 0;

  auto admit_arrivals = [&]() {
    while (next_arrival < jobs.size() && jobs[next_arrival].arrival <= state.time) {
      const Job& job = jobs[next_arrival++];
      ActiveJob active{job.id, job.arrival, job.size, job.size, std::nullopt, std::nullopt};
      active.dispatched = policy.route(state, job);
      if (active.dispatched && *active.dispatched >= state.servers) {
        throw PolicyError(policy.name() + ": routed job " + std::to_string(job.id) + " to a nonexistent server");
      }
      // Ids arrive in increasing order, so push_back keeps `active` sorted.
      state.active.push_back(active);
      if (options.record_trajectory) traj.events.push_back({state.time, EventKind::Arrival, job.id});
    }
  };

  auto emit_segment = [&](double start, double end, Segment&& seg, std::size_t n, double seg_power) {
    if (options.on_segment) options.on_segment(start, end, n, seg_power);
    if (options.record_trajectory) traj.segments.push_back(std::move(seg));
  };

  // Idle prefix before the first arrival.
  if (!jobs.empty() && jobs.front().arrival > 0.0) {
    emit_segment(0.0, jobs.front().arrival, Segment{0.0, jobs.front().arrival, {}}, 0, 0.0);
    state.time = jobs.front().arrival;
  }

  double flow = 0.0;
  double energy = 0.0;

  while (true) {
    admit_arrivals();

    // Completed jobs leave after same-instant arrivals have been routed.
    for (auto it = state.active.begin(); it != state.active.end();) {
      if (it->remaining <= options.completion_tolerance * it->size) {
        cost.per_job_flow[it->id] = state.time - it->arrival;
        if (options.record_trajectory) traj.events.push_back({state.time, EventKind::Departure, it->id});
        it = state.active.erase(it);
      } else {
        ++it;
      }
    }

    if (state.active.empty()) {
      if (next_arrival >= jobs.size()) break;
      const double t_next = jobs[next_arrival].arrival;
      emit_segment(state.time, t_next, Segment{state.time, t_next, {}}, 0, 0.0);
      state.time = t_next;
      continue;
    }

    PolicyDecision decision = policy.decide(state);
    validate_decision(state, decision, policy, first_server);

    // Per-job rate lookup, aligned with state.active.
    std::vector<double> rate(state.active.size(), 0.0);
    std::vector<std::optional<ServerId>> server(state.active.size());
    for (const Allocation& a : decision.running) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(state.active.begin(), state.active.end(), a.job,
                           [](const ActiveJob& j, JobId v) { return j.id < v; }) -
          state.active.begin());
      rate[idx] = a.speed;
      server[idx] = a.server;
      if (!first_server[a.job]) first_server[a.job] = a.server;
    }

    double dt_complete = std::numeric_limits<double>::infinity();
    std::size_t finisher = state.active.size();
    for (std::size_t i = 0; i < state.active.size(); ++i) {
      if (rate[i] > 0.0) {
        const double dt = state.active[i].remaining / rate[i];
        if (dt < dt_complete) {
          dt_complete = dt;
          finisher = i;
        }
      }
    }
    const double t_arrival =
        next_arrival < jobs.size() ? jobs[next_arrival].arrival : std::numeric_limits<double>::infinity();
    const bool arrival_first = t_arrival - state.time <= dt_complete;
    const double dt = arrival_first ? t_arrival - state.time : dt_complete;
    if (!std::isfinite(dt) || dt > options.livelock_horizon) {
      std::ostringstream msg;
      msg << policy.name() << ": no event within " << options.livelock_horizon << " time units after t="
          << state.time << " with " << state.active.size() << " unfinished jobs";
      throw Livelock(msg.str());
    }
    const double end = arrival_first ? t_arrival : state.time + dt;

    Segment seg{state.time, end, {}};
    seg.jobs.reserve(state.active.size());
    for (std::size_t i = 0; i < state.active.size(); ++i) {
      seg.jobs.push_back(SegmentJob{state.active[i].id, state.active[i].remaining, rate[i], server[i]});
    }
    const double seg_power = segment_power(seg, power);
    const std::size_t n = state.active.size();
    flow += static_cast<double>(n) * dt;
    energy += seg_power * dt;
    emit_segment(state.time, end, std::move(seg), n, seg_power);

    for (std::size_t i = 0; i < state.active.size(); ++i) {
      ActiveJob& j = state.active[i];
      if (rate[i] > 0.0) {
        j.remaining = (!arrival_first && i == finisher) ? 0.0 : std::max(0.0, j.remaining - rate[i] * dt);
        j.last_server = server[i];
      } else {
        j.last_server.reset();
      }
    }
    state.time = end;
  }

  cost.flow_time = flow;
  cost.energy = energy;
  cost.total = flow + energy;
  return result;
}

CostBreakdown evaluate_cost(const Trajectory& trajectory, const PowerFunction& power) {
  CostBreakdown cost;
  cost.per_job_flow.assign(trajectory.jobs.size(), 0.0);
  std::vector<double> last_end(trajectory.jobs.size(), -1.0);
  const double tol = 1e-12;
  for (std::size_t k = 0; k < trajectory.segments.size(); ++k) {
    const Segment& s = trajectory.segments[k];
    if (s.end < s.start) throw MalformedTrajectory("segment " + std::to_string(k) + " ends before it starts");
    if (k == 0 && std::abs(s.start) > tol) throw MalformedTrajectory("trajectory does not start at t=0");
    if (k > 0) {
      const double prev_end = trajectory.segments[k - 1].end;
      if (std::abs(s.start - prev_end) > tol * std::max(1.0, std::abs(prev_end))) {
        throw MalformedTrajectory(s.start < prev_end ? "overlapping segments at index " + std::to_string(k)
                                                     : "gap between segments at index " + std::to_string(k));
      }
    }
    const double tau = s.duration();
    cost.flow_time += static_cast<double>(s.jobs.size()) * tau;
    cost.energy += segment_power(s, power) * tau;
    for (const SegmentJob& j : s.jobs) {
      if (j.id >= trajectory.jobs.size()) throw MalformedTrajectory("segment references unknown job");
      last_end[j.id] = s.end;
    }
  }
  for (std::size_t id = 0; id < trajectory.jobs.size(); ++id) {
    if (last_end[id] >= 0.0) cost.per_job_flow[id] = last_end[id] - trajectory.jobs[id].arrival;
  }
  cost.total = cost.flow_time + cost.energy;
  return cost;
}

double competitive_ratio(const Instance& instance, Policy& policy, double baseline_cost) {
  if (instance.empty()) throw std::invalid_argument("competitive ratio is undefined on an empty instance");
  if (!(baseline_cost > 0.0)) throw std::invalid_argument("baseline cost must be positive");
  SimulationOptions options;
  options.record_trajectory = false;
  return simulate(instance, policy, options).cost.total / baseline_cost;
}

}  // namespace speedscale
