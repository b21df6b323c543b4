#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "speedscale/policy.hpp"
#include "speedscale/power_model.hpp"
#include "speedscale/workload.hpp"

namespace speedscale {

struct SegmentJob {
  JobId id = 0;
  double remaining = 0.0;  // at segment start
  double speed = 0.0;
  std::optional<ServerId> server;  // set only while running

  friend bool operator==(const SegmentJob&, const SegmentJob&) = default;
};

/// Interval with constant per-job speeds. `jobs` lists every unfinished job
/// present during the interval, ordered by id.
struct Segment {
  double start = 0.0;
  double end = 0.0;
  std::vector<SegmentJob> jobs;

  double duration() const { return end - start; }
  double remaining_at(const SegmentJob& j, double t) const { return j.remaining - j.speed * (t - start); }

  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class EventKind { Arrival, Departure };

struct TrajectoryEvent {
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  JobId job = 0;

  friend bool operator==(const TrajectoryEvent&, const TrajectoryEvent&) = default;
};

/// Piecewise-constant record of a run. Segments tile [0, makespan].
struct Trajectory {
  std::size_t servers = 1;
  std::vector<Job> jobs;
  std::vector<Segment> segments;
  std::vector<TrajectoryEvent> events;

  double makespan() const { return segments.empty() ? 0.0 : segments.back().end; }
  /// Index of the segment containing t (the later one at a boundary), or
  /// nullopt outside [0, makespan).
  std::optional<std::size_t> segment_at(double t) const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct CostBreakdown {
  double flow_time = 0.0;
  double energy = 0.0;
  double total = 0.0;
  std::vector<double> per_job_flow;  // indexed by job id
};

struct SimulationResult {
  Trajectory trajectory;
  CostBreakdown cost;
};

struct SimulationOptions {
  bool record_trajectory = true;
  /// Abort when the next event lies further than this from the current time.
  double livelock_horizon = 1e12;
  /// A job completes when remaining <= completion_tolerance * size.
  double completion_tolerance = 1e-12;
  /// Observer called for every segment: (start, end, jobs present, total power).
  std::function<void(double, double, std::size_t, double)> on_segment;
};

/// Exact event-driven execution of `policy` on `instance`. Speeds are constant
/// between arrivals and completions, so costs are integrated in closed form.
/// Throws PolicyError for infeasible decisions and Livelock when no job can
/// make progress.
SimulationResult simulate(const Instance& instance, Policy& policy, const SimulationOptions& options = {});

/// Recomputes flow time and energy from the segments alone. Throws
/// MalformedTrajectory on gaps or overlaps.
CostBreakdown evaluate_cost(const Trajectory& trajectory, const PowerFunction& power);

/// Total power drawn during a segment: sum over servers of P(sum of rates).
double segment_power(const Segment& segment, const PowerFunction& power);

/// C_policy / baseline_cost. Throws std::invalid_argument for an empty
/// instance or a nonpositive baseline.
double competitive_ratio(const Instance& instance, Policy& policy, double baseline_cost);

void write_trajectory_jsonl(const Trajectory& trajectory, std::ostream& out);
Trajectory read_trajectory_jsonl(std::istream& in);
std::string cost_to_json(const CostBreakdown& cost);

}  // namespace speedscale
