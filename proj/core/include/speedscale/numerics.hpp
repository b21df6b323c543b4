#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>

namespace speedscale::numerics {

struct MinimizeResult {
  double argmin;
  double value;
};

/// Golden-section search for the minimum of a unimodal f on [lo, hi]. Stops
/// when the bracket is narrower than tol * (1 + |x|).
template <typename F>
MinimizeResult golden_section_minimize(F&& f, double lo, double hi, double tol = 1e-10,
                                       int max_iterations = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations; ++i) {
    if (std::abs(b - a) <= tol * (1.0 + std::abs(c))) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Root of a function that changes sign on [lo, hi], by bisection to machine
/// precision (or max_iterations halvings).
template <typename F>
double bisect_root(F&& f, double lo, double hi, int max_iterations = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (const double fhi = f(hi); fhi == 0.0) {
    return hi;
  } else if ((flo < 0) == (fhi < 0)) {
    throw std::invalid_argument("bisect_root: no sign change on bracket");
  }
  for (int i = 0; i < max_iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct LinearFit {
  double slope;
  double intercept;
};

/// Ordinary least squares y = slope * x + intercept. Requires >= 2 points.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares: need >= 2 paired points");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("least_squares: degenerate abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace speedscale::numerics
