#pragma once

// q-calculus primitives on the geometric time scale {b q^n : n >= 0} u {0}.

#include <functional>

namespace qfde {

/// Scale index q and horizon b of the time scale. Both are validated on
/// construction: 0 < q < 1, b > 0.
class QScale {
 public:
  QScale(double q, double b);

  double q() const { return q_; }
  double b() const { return b_; }

 private:
  double q_;
  double b_;
};

/// Truncation policy for the infinite products and series.
struct SeriesControl {
  double rel_tol = 1e-14;
  int max_terms = 10'000;

  /// Throws DomainError unless 0 < rel_tol < 1 and max_terms >= 1.
  void validate() const;
};

using ScalarFn = std::function<double(double)>;

/// Throws DomainError unless 0 < q < 1.
void check_scale_index(double q);

/// [alpha]_q = (1 - q^alpha) / (1 - q).
double q_bracket(double alpha, double q);

/// [n]_q! = [n]_q [n-1]_q ... [1]_q, with [0]_q! = 1.
double q_factorial(int n, double q);

/// (t - s)^{(k)} = prod_{i=0}^{k-1} (t - q^i s).
double shifted_factorial_int(double t, double s, int k, double q);

/// (t - s)^{(alpha)} for real alpha and 0 <= s <= t, t > 0.
///
/// Non-integer orders use t^alpha prod_i (t - q^i s)/(t - q^{alpha+i} s),
/// stopped once a factor is within rel_tol*(1-q) of one. Integer orders are
/// finite: nonnegative ones route to shifted_factorial_int, negative ones to
/// the telescoped reciprocal 1 / prod_{j=1}^{k} (t - q^{-j} s).
double shifted_factorial_real(double t, double s, double alpha, double q,
                              const SeriesControl& ctl = {});

/// Gamma_q(alpha) = (1 - q)^{(alpha-1)} (1 - q)^{1-alpha}, where the
/// q-shifted factorial is read with t = 1, s = q.
double q_gamma(double alpha, double q, const SeriesControl& ctl = {});

/// B_q(alpha, beta) = int_0^1 t^{alpha-1} (1 - q t)^{(beta-1)} d_q t.
double q_beta(double alpha, double beta, double q,
              const SeriesControl& ctl = {});

/// Jackson integral from 0 to x: (1-q) sum_n x q^n f(x q^n).
double q_integral_zero(const ScalarFn& f, double x, double q,
                       const SeriesControl& ctl = {});

/// Jackson integral over [a, b], 0 <= a <= b.
double q_integral(const ScalarFn& f, double a, double b, double q,
                  const SeriesControl& ctl = {});

/// D_q f(t). At t = 0 this is the lattice limit along q^n.
double q_derivative(const ScalarFn& f, double t, double q,
                    const SeriesControl& ctl = {});

/// D_q^n f(t). For t > 0 uses the finite difference over f(q^j t), j=0..n.
double q_derivative_n(const ScalarFn& f, double t, double q, int n,
                      const SeriesControl& ctl = {});

}  // namespace qfde
