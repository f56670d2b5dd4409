#include "qfde/qfrac.hpp"

#include <cmath>
#include <string>

#include "qfde/errors.hpp"

namespace qfde {

namespace {

void require_zero_lower(double lower) {
  if (lower != 0.0) {
    throw NotSupportedError("only the lower limit a = 0 is supported");
  }
}

// Orders >= 1 need n = ceil(alpha) > 1 derivatives, which are out of scope.
void require_below_one(double alpha) {
  if (!(alpha < 1.0)) {
    throw NotSupportedError("fractional derivative of order " +
                            std::to_string(alpha) + " >= 1");
  }
}

}  // namespace

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("fractional order must lie in (0, 1), got " +
                      std::to_string(alpha));
  }
}

double frac_q_integral(const ScalarFn& f, double alpha, double t, double q,
                       const SeriesControl& ctl, double lower) {
  require_zero_lower(lower);
  check_scale_index(q);
  if (!(alpha > 0.0)) {
    if (alpha == 0.0) return f(t);
    throw DomainError("frac_q_integral: order must be >= 0");
  }
  if (t < 0.0) throw DomainError("frac_q_integral: requires t >= 0");
  if (t == 0.0) return 0.0;

  const ScalarFn integrand = [&](double s) {
    return shifted_factorial_real(t, q * s, alpha - 1.0, q, ctl) * f(s);
  };
  return q_integral_zero(integrand, t, q, ctl) / q_gamma(alpha, q, ctl);
}

double caputo_q_derivative(const ScalarFn& f, double alpha, double t,
                           double q, const SeriesControl& ctl, double lower) {
  require_zero_lower(lower);
  if (alpha <= 0.0) return frac_q_integral(f, -alpha, t, q, ctl);
  require_below_one(alpha);
  if (!(t > 0.0)) throw DomainError("caputo_q_derivative: requires t > 0");

  const ScalarFn dq = [&](double s) { return q_derivative(f, s, q, ctl); };
  return frac_q_integral(dq, 1.0 - alpha, t, q, ctl);
}

double rl_q_derivative(const ScalarFn& f, double alpha, double t, double q,
                       const SeriesControl& ctl, double lower) {
  require_zero_lower(lower);
  if (alpha <= 0.0) return frac_q_integral(f, -alpha, t, q, ctl);
  require_below_one(alpha);
  if (!(t > 0.0)) throw DomainError("rl_q_derivative: requires t > 0");

  const ScalarFn integral = [&](double u) {
    return frac_q_integral(f, 1.0 - alpha, u, q, ctl);
  };
  return q_derivative(integral, t, q, ctl);
}

}  // namespace qfde
