#include "speedscale/power_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace speedscale {

PowerFunction::PowerFunction(double alpha, double coefficient)
    : alpha_(alpha), coefficient_(coefficient) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("power function exponent must be finite and > 1, got " +
                                std::to_string(alpha));
  }
  if (!(coefficient >= 1.0) || !std::isfinite(coefficient)) {
    throw std::invalid_argument("power function coefficient must be finite and >= 1, got " +
                                std::to_string(coefficient));
  }
}

double PowerFunction::eval(double speed) const {
  if (speed < 0.0) throw std::domain_error("P(s) requires s >= 0");
  if (speed == 0.0) return 0.0;
  return coefficient_ * std::pow(speed, alpha_);
}

double PowerFunction::inverse(double power) const {
  if (power < 0.0) throw std::domain_error("P^{-1}(p) requires p >= 0");
  if (power == 0.0) return 0.0;
  return std::pow(power / coefficient_, 1.0 / alpha_);
}

double PowerFunction::derivative(double speed) const {
  if (speed < 0.0) throw std::domain_error("P'(s) requires s >= 0");
  if (speed == 0.0) return 0.0;
  return coefficient_ * alpha_ * std::pow(speed, alpha_ - 1.0);
}

double PowerFunction::delta(double x) const {
  if (!(x > 0.0)) return 0.0;
  return derivative(inverse(x));
}

double PowerFunction::s_bar() const { return std::pow(coefficient_, -1.0 / (alpha_ - 1.0)); }

double eval(const PowerFunction& pf, double speed) { return pf.eval(speed); }
double eval_inverse(const PowerFunction& pf, double power) { return pf.inverse(power); }
double delta(const PowerFunction& pf, double x) { return pf.delta(x); }
double s_bar(const PowerFunction& pf) { return pf.s_bar(); }

double check_bansal_inequality(const PowerFunction& pf, double s, double s_tilde, double x) {
  if (s < 0.0 || s_tilde < 0.0 || x < 0.0) {
    throw std::domain_error("bansal inequality arguments must be nonnegative");
  }
  const double d = pf.delta(x);
  const double lhs = d * (-s + s_tilde);
  const double rhs = (-s + pf.inverse(x)) * d + pf.eval(s_tilde) - x;
  return rhs - lhs;
}

}  // namespace speedscale
