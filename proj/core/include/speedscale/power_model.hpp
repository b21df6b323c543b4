#pragma once

namespace speedscale {

enum class PowerForm {
  PowerLaw,  // P(s) = c * s^alpha
};

/// Energy curve P(s) = c * s^alpha with alpha > 1 and c >= 1.
///
/// Both conditions are required: strict convexity with P(0) = 0, and
/// submultiplicativity P(xy) <= P(x) P(y). The constructor rejects parameters
/// outside that family. Immutable value type.
class PowerFunction {
 public:
  PowerFunction(double alpha, double coefficient = 1.0);

  double alpha() const { return alpha_; }
  double coefficient() const { return coefficient_; }
  PowerForm form() const { return PowerForm::PowerLaw; }

  /// P(s). Throws std::domain_error for s < 0.
  double eval(double speed) const;
  /// P^{-1}(p). Throws std::domain_error for p < 0.
  double inverse(double power) const;
  /// P'(s), computed analytically.
  double derivative(double speed) const;
  /// Marginal power at the speed whose power is x: P'(P^{-1}(x)); zero for x <= 0.
  double delta(double x) const;
  /// inf{s > 0 : P(s) > s}.
  double s_bar() const;

  friend bool operator==(const PowerFunction&, const PowerFunction&) = default;

 private:
  double alpha_;
  double coefficient_;
};

double eval(const PowerFunction& pf, double speed);
double eval_inverse(const PowerFunction& pf, double power);
double delta(const PowerFunction& pf, double x);
double s_bar(const PowerFunction& pf);

/// Returns RHS - LHS of
///   delta(x) (-s + s_tilde) <= (-s + P^{-1}(x)) delta(x) + P(s_tilde) - x,
/// which is nonnegative for every convex P. Negative arguments throw
/// std::domain_error.
double check_bansal_inequality(const PowerFunction& pf, double s, double s_tilde, double x);

}  // namespace speedscale
