#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "speedscale/power_model.hpp"
#include "speedscale/workload.hpp"

namespace speedscale {

struct ActiveJob {
  JobId id = 0;
  double arrival = 0.0;
  double size = 0.0;
  double remaining = 0.0;
  // Server chosen at arrival by an immediate-dispatch policy.
  std::optional<ServerId> dispatched;
  // Server the job ran on during the previous segment, if it ran.
  std::optional<ServerId> last_server;
};

/// What a policy sees at a decision epoch. `active` holds every released,
/// unfinished job ordered by id.
struct SystemState {
  double time = 0.0;
  std::size_t servers = 1;
  PowerFunction power{2.0};
  std::vector<ActiveJob> active;

  std::size_t unfinished() const { return active.size(); }
  const ActiveJob* find(JobId id) const;
};

struct Allocation {
  JobId job = 0;
  ServerId server = 0;
  double speed = 0.0;  // processing rate of this job
};

/// Jobs to run until the next event, with their servers and rates. Jobs in
/// the state that are not listed are held (speed 0). A server's speed is the
/// sum of the rates of the jobs it runs.
struct PolicyDecision {
  std::vector<Allocation> running;
};

/// Active jobs not listed in the decision.
std::vector<JobId> queued(const SystemState& state, const PolicyDecision& decision);

/// Online routing + scheduling + speed scaling rule. The simulator calls
/// reset() once, route() for every arrival in (arrival, id) order, and
/// decide() after every event.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  /// Whether a job may run on a server other than the one it first used.
  virtual bool migratory() const { return false; }
  /// Whether a server may run several jobs at once (processor sharing).
  virtual bool shares_servers() const { return false; }

  virtual void reset(const Instance& instance) { (void)instance; }
  /// Immediate-dispatch policies return the server for the arriving job.
  virtual std::optional<ServerId> route(const SystemState& state, const Job& arrival) {
    (void)state;
    (void)arrival;
    return std::nullopt;
  }
  virtual PolicyDecision decide(const SystemState& state) = 0;
};

}  // namespace speedscale
