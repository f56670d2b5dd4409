#pragma once

// Fractional q-integral and fractional q-derivatives with lower limit 0.

#include "qfde/qcore.hpp"

namespace qfde {

/// An order strictly inside (0, 1).
class FracOrder {
 public:
  explicit FracOrder(double alpha);

  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// I_q^alpha f(t) = 1/Gamma_q(alpha) int_0^t (t - qs)^{(alpha-1)} f(s) d_q s.
/// A nonzero lower limit throws NotSupportedError.
double frac_q_integral(const ScalarFn& f, double alpha, double t, double q,
                       const SeriesControl& ctl = {}, double lower = 0.0);

/// Caputo derivative: I_q^{1-alpha} D_q f for 0 < alpha < 1. Orders
/// alpha <= 0 are the fractional integral of order -alpha.
double caputo_q_derivative(const ScalarFn& f, double alpha, double t,
                           double q, const SeriesControl& ctl = {},
                           double lower = 0.0);

/// Riemann-Liouville derivative: D_q I_q^{1-alpha} f for 0 < alpha < 1.
/// Orders alpha <= 0 are the fractional integral of order -alpha.
double rl_q_derivative(const ScalarFn& f, double alpha, double t, double q,
                       const SeriesControl& ctl = {}, double lower = 0.0);

}  // namespace qfde
