#include "speedscale/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace speedscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct IntervalState {
  const Segment* alg = nullptr;
  const Segment* opp = nullptr;
};

std::vector<double> positive_remaining(const Segment* seg, double t) {
  std::vector<double> out;
  if (seg == nullptr) return out;
  for (const SegmentJob& j : seg->jobs) {
    const double r = seg->remaining_at(j, t);
    if (r > 0.0) out.push_back(r);
  }
  return out;
}

const Segment* segment_for(const Trajectory& traj, double t) {
  const auto idx = traj.segment_at(t);
  return idx ? &traj.segments[*idx] : nullptr;
}

double running_power(const Segment* seg, const PowerFunction& power) {
  return seg == nullptr ? 0.0 : segment_power(*seg, power);
}

std::size_t present(const Segment* seg) { return seg == nullptr ? 0 : seg->jobs.size(); }

std::vector<double> merged_grid(const Trajectory& alg, const Trajectory& opp) {
  std::vector<double> grid{0.0};
  for (const Trajectory* t : {&alg, &opp}) {
    for (const Segment& s : t->segments) {
      grid.push_back(s.start);
      grid.push_back(s.end);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void require_same_jobs(const Trajectory& alg, const Trajectory& opp) {
  if (alg.jobs != opp.jobs || alg.servers != opp.servers) {
    throw std::invalid_argument("trajectories describe different instances");
  }
}

double phi_at(const IntervalState& st, double t, std::size_t m, const PowerFunction& power,
              const PotentialConstants& k, FTable& f) {
  ProfileAtTime p{positive_remaining(st.alg, t), positive_remaining(st.opp, t), m, power};
  return potential(p, k, f);
}

bool served_prefix(const std::vector<double>& remaining, const std::vector<double>& speeds, std::size_t limit) {
  double max_served = -kInf;
  double min_idle = kInf;
  std::size_t served = 0;
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    if (speeds[i] < 0.0) return false;
    if (speeds[i] > 0.0) {
      max_served = std::max(max_served, remaining[i]);
      ++served;
    } else {
      min_idle = std::min(min_idle, remaining[i]);
    }
  }
  return served <= limit && max_served <= min_idle;
}

}  // namespace

PotentialConstants srpt_comparator_constants(const PowerFunction& power) {
  PotentialConstants k;
  k.c1 = 2.0;
  k.c2 = 2.0 / power.inverse(1.0);
  k.c = k.c1 + k.c2 * std::max(1.0, power.eval(power.s_bar()));
  return k;
}

PotentialConstants general_comparator_constants(const PowerFunction& power) {
  if (!(power.alpha() > 1.0 && power.alpha() < 2.0) || power.coefficient() != 1.0) {
    throw std::invalid_argument("general comparator constants need P(s) = s^alpha with 1 < alpha < 2");
  }
  PotentialConstants k;
  k.c1 = 2.0 / (2.0 - power.alpha());
  k.c2 = 3.0;
  k.c = k.c1 + k.c2;
  return k;
}

double srpt_ratio_ceiling(const PowerFunction& power, std::size_t m) {
  const double md = static_cast<double>(m);
  return power.eval(2.0 - 1.0 / md) * srpt_comparator_constants(power).c;
}

FTable::FTable(PowerFunction power, std::size_t m) : power_(power), m_(m), values_{0.0} {
  if (m == 0) throw std::invalid_argument("server count must be positive");
}

double FTable::operator()(std::size_t i) {
  while (values_.size() <= i) {
    const double j = static_cast<double>(values_.size());
    values_.push_back(values_.back() + power_.delta(j / static_cast<double>(m_)));
  }
  return values_[i];
}

double f_value(const PowerFunction& power, std::size_t m, std::size_t i) {
  FTable f(power, m);
  return f(i);
}

double phi1(const ProfileAtTime& profile, double c1) {
  FTable f(profile.power, profile.m);
  return phi1(profile, c1, f);
}

double phi1(const ProfileAtTime& profile, double c1, FTable& f) {
  std::vector<double> a = profile.alg_remaining;
  std::vector<double> o = profile.opp_remaining;
  std::sort(a.begin(), a.end());
  std::sort(o.begin(), o.end());
  std::vector<double> breaks;
  breaks.reserve(a.size() + o.size());
  std::merge(a.begin(), a.end(), o.begin(), o.end(), std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // On (prev, b], n(q) counts alg sizes >= b.
  double total = 0.0;
  double prev = 0.0;
  std::size_t ia = 0;
  std::size_t io = 0;
  for (double b : breaks) {
    while (ia < a.size() && a[ia] < b) ++ia;
    while (io < o.size() && o[io] < b) ++io;
    const auto n = static_cast<std::ptrdiff_t>(a.size() - ia);
    const auto no = static_cast<std::ptrdiff_t>(o.size() - io);
    if (n > no && b > prev) total += (b - prev) * f(static_cast<std::size_t>(n - no));
    prev = b;
  }
  return c1 * total;
}

double phi2(const ProfileAtTime& profile, double c2) {
  double diff = 0.0;
  for (double r : profile.alg_remaining) diff += r;
  for (double r : profile.opp_remaining) diff -= r;
  return c2 * diff;
}

double potential(const ProfileAtTime& profile, const PotentialConstants& k, FTable& f) {
  return phi1(profile, k.c1, f) + phi2(profile, k.c2);
}

std::vector<double> remaining_at(const Trajectory& trajectory, double t) {
  return positive_remaining(segment_for(trajectory, t), t);
}

DriftReport check_drift(const Trajectory& alg, const Trajectory& opp, const PowerFunction& power,
                        const PotentialConstants& constants, std::size_t samples_per_interval) {
  require_same_jobs(alg, opp);
  DriftReport report;
  report.constants = constants;
  const std::size_t m = alg.servers;
  FTable f(power, m);
  const std::vector<double> grid = merged_grid(alg, opp);
  const std::size_t per = std::max<std::size_t>(samples_per_interval, 1);

  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t0 = grid[k];
    const double t1 = grid[k + 1];
    const double tau = t1 - t0;
    if (!(tau > 1e-12 * std::max(1.0, std::abs(t1)))) continue;  // rounding slivers between coincident events
    const double mid = 0.5 * (t0 + t1);
    const IntervalState st{segment_for(alg, mid), segment_for(opp, mid)};
    if (present(st.alg) == 0 && present(st.opp) == 0) continue;  // both idle: Phi and both costs are zero
    const double alg_rate = static_cast<double>(present(st.alg)) + running_power(st.alg, power);
    const double opp_rate = static_cast<double>(present(st.opp)) + running_power(st.opp, power);

    const double h = 1e-6 * tau;
    for (std::size_t s = 0; s < per; ++s) {
      const double t = t0 + (static_cast<double>(s) + 0.5) / static_cast<double>(per) * tau;
      const double dphi = (phi_at(st, t + h, m, power, constants, f) - phi_at(st, t - h, m, power, constants, f)) /
                          (2.0 * h);
      DriftSample sample{t, alg_rate + dphi, constants.c * opp_rate};
      report.min_slack = std::min(report.min_slack, sample.rhs - sample.lhs);
      report.samples.push_back(sample);
    }

    const double dphi = phi_at(st, t1, m, power, constants, f) - phi_at(st, t0, m, power, constants, f);
    const double lhs = dphi + tau * alg_rate;
    const double rhs = constants.c * tau * opp_rate;
    const double scale = std::abs(dphi) + tau * alg_rate + constants.c * tau * opp_rate;
    const double slack = scale > 0.0 ? (rhs - lhs) / scale : 0.0;
    report.min_integrated_slack = std::min(report.min_integrated_slack, slack);
  }
  report.jumps = check_boundary(alg, opp, power, constants).jumps;
  return report;
}

bool BoundaryReport::passed(double tolerance) const {
  return std::abs(phi_start) <= tolerance && std::abs(phi_end) <= tolerance && max_arrival_jump <= tolerance &&
         max_departure_jump <= tolerance;
}

BoundaryReport check_boundary(const Trajectory& alg, const Trajectory& opp, const PowerFunction& power,
                              const PotentialConstants& constants) {
  require_same_jobs(alg, opp);
  BoundaryReport report;
  const std::vector<double> grid = merged_grid(alg, opp);
  if (grid.size() < 2) return report;
  const std::size_t m = alg.servers;
  FTable f(power, m);

  auto interval = [&](std::size_t k) {
    const double mid = 0.5 * (grid[k] + grid[k + 1]);
    return IntervalState{segment_for(alg, mid), segment_for(opp, mid)};
  };
  auto has_event = [&](double t, EventKind kind) {
    for (const Trajectory* tr : {&alg, &opp}) {
      for (const TrajectoryEvent& e : tr->events) {
        if (e.time == t && e.kind == kind) return true;
      }
    }
    return false;
  };

  report.phi_start = phi_at(interval(0), grid.front(), m, power, constants, f);
  report.phi_end = phi_at(interval(grid.size() - 2), grid.back(), m, power, constants, f);

  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const double t = grid[k];
    const double left = phi_at(interval(k - 1), t, m, power, constants, f);
    const double right = phi_at(interval(k), t, m, power, constants, f);
    const bool departure = has_event(t, EventKind::Departure);
    const bool arrival = has_event(t, EventKind::Arrival);
    if (!arrival && !departure) continue;
    PotentialJump jump{t, departure ? EventKind::Departure : EventKind::Arrival, right - left};
    if (departure) {
      report.max_departure_jump = std::max(report.max_departure_jump, jump.jump);
    } else {
      report.max_arrival_jump = std::max(report.max_arrival_jump, std::abs(jump.jump));
    }
    report.jumps.push_back(jump);
  }
  return report;
}

std::string to_string(DriftBound which) {
  switch (which) {
    case DriftBound::Phi1Srpt:
      return "phi1-srpt";
    case DriftBound::Phi2Srpt:
      return "phi2-srpt";
    case DriftBound::Phi1General:
      return "phi1-general";
    case DriftBound::Phi2General:
      return "phi2-general";
  }
  return "unknown";
}

double check_drift_bound(const ProfileAtTime& profile, const std::vector<double>& alg_speeds,
                         const std::vector<double>& opp_speeds, DriftBound which, const PotentialConstants& constants) {
  const std::vector<double>& a = profile.alg_remaining;
  const std::vector<double>& o = profile.opp_remaining;
  if (a.size() != alg_speeds.size() || o.size() != opp_speeds.size()) {
    throw std::invalid_argument("speed vectors must align with remaining sizes");
  }
  for (double r : a) {
    if (!(r > 0.0)) throw std::invalid_argument("remaining sizes must be positive");
  }
  for (double r : o) {
    if (!(r > 0.0)) throw std::invalid_argument("remaining sizes must be positive");
  }
  const PowerFunction& P = profile.power;
  const std::size_t m = profile.m;
  const std::size_t n = a.size();
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double no = static_cast<double>(o.size());

  // The algorithm must follow the SRPT speed rule.
  const double rule_speed = n == 0 ? 0.0 : P.inverse(std::max(nd / md, 1.0));
  std::size_t alg_served = 0;
  for (double s : alg_speeds) {
    if (s > 0.0) {
      ++alg_served;
      if (std::abs(s - rule_speed) > 1e-9 * rule_speed) {
        throw std::invalid_argument("algorithm speeds do not follow the SRPT speed rule");
      }
    }
  }
  if (alg_served != std::min(n, m) || !served_prefix(a, alg_speeds, m)) {
    throw std::invalid_argument("algorithm does not serve its min(m, n) shortest jobs");
  }

  const bool srpt_bound = which == DriftBound::Phi1Srpt || which == DriftBound::Phi2Srpt;
  if (srpt_bound) {
    if (!served_prefix(o, opp_speeds, m)) throw std::invalid_argument("comparator does not follow SRPT");
  } else {
    if (!(P.alpha() > 1.0 && P.alpha() < 2.0) || P.coefficient() != 1.0) {
      throw std::invalid_argument("bound requires P(s) = s^alpha with 1 < alpha < 2");
    }
    std::size_t served = 0;
    for (double s : opp_speeds) {
      if (s < 0.0) throw std::invalid_argument("negative comparator speed");
      if (s > 0.0) ++served;
      if (which == DriftBound::Phi2General && s > 0.0 && s < P.s_bar()) {
        throw std::invalid_argument("bound requires comparator speeds of at least s_bar");
      }
    }
    if (served > m) throw std::invalid_argument("comparator serves more than m jobs");
  }

  // Forward step short enough that no size reaches zero and no two sizes
  // moving at different rates meet.
  std::vector<std::pair<double, double>> pts;  // (remaining, rate)
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(a[i], alg_speeds[i]);
  for (std::size_t i = 0; i < o.size(); ++i) pts.emplace_back(o[i], opp_speeds[i]);
  double horizon = kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].second > 0.0) horizon = std::min(horizon, pts[i].first / pts[i].second);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double gap = pts[j].first - pts[i].first;
      const double closing = pts[i].second - pts[j].second;  // i shrinks slower than j
      if (gap > 0.0 && closing < 0.0) horizon = std::min(horizon, gap / -closing);
    }
  }
  const double h = std::isfinite(horizon) ? 0.25 * horizon : 1.0;

  ProfileAtTime later = profile;
  for (std::size_t i = 0; i < n; ++i) later.alg_remaining[i] = a[i] - alg_speeds[i] * h;
  for (std::size_t i = 0; i < o.size(); ++i) later.opp_remaining[i] = o[i] - opp_speeds[i] * h;

  double opp_power = 0.0;
  double opp_power_floor = 0.0;
  for (double s : opp_speeds) {
    if (s > 0.0) {
      opp_power += P.eval(s);
      opp_power_floor += std::max(P.eval(P.s_bar()), P.eval(s));
    }
  }
  const double c1 = constants.c1;
  const double c2 = constants.c2;
  const double served = static_cast<double>(std::min(n, m));

  double measured = 0.0;
  double bound = 0.0;
  switch (which) {
    case DriftBound::Phi1Srpt:
      measured = (phi1(later, c1) - phi1(profile, c1)) / h;
      bound = n >= m ? c1 * no - c1 * nd + c1 * (md - 1.0) / 2.0 + c1 * opp_power
                     : c1 * no - c1 * nd * (nd + 1.0) / (2.0 * md) + c1 * opp_power;
      break;
    case DriftBound::Phi2Srpt:
      measured = (phi2(later, c2) - phi2(profile, c2)) / h;
      bound = -c2 * served * P.inverse(1.0) + c2 * opp_power_floor;
      break;
    case DriftBound::Phi1General: {
      const double g = 2.0 - P.alpha();
      measured = (phi1(later, c1) - phi1(profile, c1)) / h;
      bound = n >= m ? c1 * no - c1 * g * nd + c1 * g * (md - 1.0) / 2.0 + c1 * opp_power
                     : c1 * no + c1 * g * nd / 2.0 + c1 * opp_power;
      break;
    }
    case DriftBound::Phi2General:
      measured = (phi2(later, c2) - phi2(profile, c2)) / h;
      bound = -c2 * served + c2 * opp_power;
      break;
  }
  return bound - measured;
}

std::string drift_report_to_json(const DriftReport& report) {
  nlohmann::json samples = nlohmann::json::array();
  for (const DriftSample& s : report.samples) samples.push_back({{"time", s.time}, {"lhs", s.lhs}, {"rhs", s.rhs}});
  nlohmann::json jumps = nlohmann::json::array();
  for (const PotentialJump& j : report.jumps) {
    jumps.push_back(
        {{"time", j.time}, {"kind", j.kind == EventKind::Arrival ? "arrival" : "departure"}, {"jump", j.jump}});
  }
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json doc = {
      {"constants", {{"c1", report.constants.c1}, {"c2", report.constants.c2}, {"c", report.constants.c}}},
      {"min_slack", finite_or_null(report.min_slack)},
      {"min_integrated_slack", finite_or_null(report.min_integrated_slack)},
      {"passed", report.passed()},
      {"samples", samples},
      {"boundary_jumps", jumps}};
  return doc.dump(2);
}

}  // namespace speedscale
