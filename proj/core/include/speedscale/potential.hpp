#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "speedscale/power_model.hpp"
#include "speedscale/simulator.hpp"

namespace speedscale {

struct PotentialConstants {
  double c1 = 2.0;
  double c2 = 2.0;
  double c = 4.0;  // multiplier of the comparator's cost in the drift inequality
};

/// c1 = 2, c2 = 2 / P^{-1}(1), c = c1 + c2 max(1, P(s_bar)). Valid against
/// comparators that follow SRPT at arbitrary speeds.
PotentialConstants srpt_comparator_constants(const PowerFunction& power);

/// c1 = 2 / (2 - alpha), c2 = 3, c = c1 + c2. Valid against arbitrary
/// comparators for P(s) = s^alpha with 1 < alpha < 2; throws
/// std::invalid_argument otherwise.
PotentialConstants general_comparator_constants(const PowerFunction& power);

/// P(2 - 1/m) (2 + 2 max(1, P(s_bar)) / P^{-1}(1)): the guaranteed ratio of
/// SRPT speed scaling to the offline optimum on m servers.
double srpt_ratio_ceiling(const PowerFunction& power, std::size_t m);

/// f(i/m) = sum_{j=1}^{i} delta(j/m), memoized.
class FTable {
 public:
  FTable(PowerFunction power, std::size_t m);
  double operator()(std::size_t i);
  std::size_t servers() const { return m_; }

 private:
  PowerFunction power_;
  std::size_t m_;
  std::vector<double> values_;
};

double f_value(const PowerFunction& power, std::size_t m, std::size_t i);

/// Remaining works of the algorithm and the comparator at one instant.
struct ProfileAtTime {
  std::vector<double> alg_remaining;
  std::vector<double> opp_remaining;
  std::size_t m = 1;
  PowerFunction power{2.0};
};

/// c1 * integral over q > 0 of f(max(0, n(q) - n_o(q)) / m), evaluated exactly
/// over the intervals between distinct remaining sizes.
double phi1(const ProfileAtTime& profile, double c1);
double phi1(const ProfileAtTime& profile, double c1, FTable& f);
/// c2 * integral over q > 0 of (n(q) - n_o(q)) = c2 (alg work - comparator work).
double phi2(const ProfileAtTime& profile, double c2);
double potential(const ProfileAtTime& profile, const PotentialConstants& k, FTable& f);

/// Positive remaining works at time t, taken from the segment containing t
/// (the later one at a boundary). Empty outside [0, makespan).
std::vector<double> remaining_at(const Trajectory& trajectory, double t);

struct DriftSample {
  double time = 0.0;
  double lhs = 0.0;  // n + sum P(s_k) + dPhi/dt
  double rhs = 0.0;  // c (n_o + sum P(s~_k))
};

struct PotentialJump {
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  double jump = 0.0;  // Phi(t+) - Phi(t-)
};

struct DriftReport {
  PotentialConstants constants;
  std::vector<DriftSample> samples;
  /// Least rhs - lhs over the pointwise samples (finite-difference derivative).
  double min_slack = std::numeric_limits<double>::infinity();
  /// Least normalized rhs - lhs of the drift inequality integrated over each
  /// interval where both trajectories are affine: Phi(end-) - Phi(start+)
  /// + integral(n + sum P) <= c integral(n_o + sum P~).
  double min_integrated_slack = std::numeric_limits<double>::infinity();
  std::vector<PotentialJump> jumps;

  bool passed(double tolerance = 1e-7) const { return min_integrated_slack >= -tolerance; }
};

/// Scans the drift inequality along a pair of trajectories over the same jobs.
/// Throws std::invalid_argument for mismatched trajectories.
DriftReport check_drift(const Trajectory& alg, const Trajectory& opp, const PowerFunction& power,
                        const PotentialConstants& constants, std::size_t samples_per_interval = 4);

struct BoundaryReport {
  double phi_start = 0.0;
  double phi_end = 0.0;
  std::vector<PotentialJump> jumps;
  double max_arrival_jump = 0.0;    // largest |jump| at pure arrival instants
  double max_departure_jump = 0.0;  // largest jump at instants with a departure

  bool passed(double tolerance = 1e-9) const;
};

/// Phi at the ends of the busy horizon and its jumps at every event instant.
BoundaryReport check_boundary(const Trajectory& alg, const Trajectory& opp, const PowerFunction& power,
                              const PotentialConstants& constants);

enum class DriftBound {
  Phi1Srpt,     // dPhi1/dt against an SRPT comparator
  Phi2Srpt,     // dPhi2/dt against an SRPT comparator
  Phi1General,  // dPhi1/dt against any comparator, 1 < alpha < 2
  Phi2General,  // dPhi2/dt against any comparator, 1 < alpha < 2
};

std::string to_string(DriftBound which);

/// bound - measured dPhi_i/dt at `profile`, where the algorithm and the
/// comparator run their jobs at `alg_speeds` / `opp_speeds` (aligned with the
/// remaining vectors). The derivative is a forward difference over a step
/// short enough that no two sizes cross. Throws std::invalid_argument when the
/// speeds do not fit the bound's premises.
double check_drift_bound(const ProfileAtTime& profile, const std::vector<double>& alg_speeds,
                         const std::vector<double>& opp_speeds, DriftBound which, const PotentialConstants& constants);

std::string drift_report_to_json(const DriftReport& report);

}  // namespace speedscale
