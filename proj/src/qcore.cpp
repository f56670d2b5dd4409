#include "qfde/qcore.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qfde/errors.hpp"

namespace qfde {

namespace {

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x; }

// Gaussian binomial coefficient [n choose k]_q.
double q_binomial(int n, int k, double q) {
  double value = 1.0;
  for (int j = 1; j <= k; ++j) {
    value *= (1.0 - std::pow(q, n - k + j)) / (1.0 - std::pow(q, j));
  }
  return value;
}

}  // namespace

QScale::QScale(double q, double b) : q_(q), b_(b) {
  check_scale_index(q);
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError("time horizon b must be positive, got " +
                      std::to_string(b));
  }
}

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw DomainError("series rel_tol must lie in (0, 1)");
  }
  if (max_terms < 1) throw DomainError("series max_terms must be >= 1");
}

void check_scale_index(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("scale index q must lie in (0, 1), got " +
                      std::to_string(q));
  }
}

double q_bracket(double alpha, double q) {
  check_scale_index(q);
  return (1.0 - std::pow(q, alpha)) / (1.0 - q);
}

double q_factorial(int n, double q) {
  check_scale_index(q);
  if (n < 0) throw DomainError("q_factorial: negative argument");
  double value = 1.0;
  for (int k = 2; k <= n; ++k) value *= q_bracket(k, q);
  return value;
}

double shifted_factorial_int(double t, double s, int k, double q) {
  check_scale_index(q);
  if (k < 0) throw DomainError("shifted_factorial_int: negative order");
  double value = 1.0;
  for (int i = 0; i < k; ++i) value *= t - std::pow(q, i) * s;
  return value;
}

double shifted_factorial_real(double t, double s, double alpha, double q,
                              const SeriesControl& ctl) {
  check_scale_index(q);
  ctl.validate();
  if (!(t > 0.0)) throw DomainError("shifted_factorial_real: requires t > 0");
  if (s < 0.0 || s > t) {
    throw DomainError("shifted_factorial_real: requires 0 <= s <= t");
  }

  if (is_integer(alpha)) {
    const int k = static_cast<int>(alpha);
    if (k >= 0) return shifted_factorial_int(t, s, k, q);
    double denom = 1.0;
    for (int j = 1; j <= -k; ++j) denom *= t - std::pow(q, -j) * s;
    if (denom == 0.0) {
      throw SingularityError("shifted_factorial_real: zero factor");
    }
    return 1.0 / denom;
  }

  const double cutoff = ctl.rel_tol * (1.0 - q);
  double product = std::pow(t, alpha);
  for (int i = 0; i < ctl.max_terms; ++i) {
    const double num = t - std::pow(q, i) * s;
    const double den = t - std::pow(q, alpha + i) * s;
    if (den == 0.0) {
      throw SingularityError("shifted_factorial_real: vanishing denominator");
    }
    const double factor = num / den;
    product *= factor;
    if (std::abs(factor - 1.0) < cutoff) return product;
  }
  throw ConvergenceError("shifted_factorial_real: product did not converge in " +
                         std::to_string(ctl.max_terms) + " factors");
}

double q_gamma(double alpha, double q, const SeriesControl& ctl) {
  check_scale_index(q);
  if (alpha <= 0.0 && is_integer(alpha)) {
    throw PoleError("q_gamma: pole at nonpositive integer " +
                    std::to_string(alpha));
  }
  return shifted_factorial_real(1.0, q, alpha - 1.0, q, ctl) *
         std::pow(1.0 - q, 1.0 - alpha);
}

double q_beta(double alpha, double beta, double q, const SeriesControl& ctl) {
  if (!(alpha > 0.0 && beta > 0.0)) {
    throw DomainError("q_beta: arguments must be positive");
  }
  const ScalarFn integrand = [&](double t) {
    return std::pow(t, alpha - 1.0) *
           shifted_factorial_real(1.0, q * t, beta - 1.0, q, ctl);
  };
  return q_integral_zero(integrand, 1.0, q, ctl);
}

double q_integral_zero(const ScalarFn& f, double x, double q,
                       const SeriesControl& ctl) {
  check_scale_index(q);
  ctl.validate();
  if (x < 0.0) throw DomainError("q_integral_zero: requires x >= 0");
  if (x == 0.0) return 0.0;

  constexpr double kTiny = std::numeric_limits<double>::min();
  double sum = 0.0;
  int quiet = 0;
  for (int n = 0; n < ctl.max_terms; ++n) {
    const double node = x * std::pow(q, n);
    const double term = (1.0 - q) * node * f(node);
    sum += term;
    quiet = std::abs(term) < ctl.rel_tol * (std::abs(sum) + kTiny) ? quiet + 1
                                                                    : 0;
    if (quiet == 3) return sum;
  }
  throw ConvergenceError("q_integral_zero: series did not converge in " +
                         std::to_string(ctl.max_terms) + " terms");
}

double q_integral(const ScalarFn& f, double a, double b, double q,
                  const SeriesControl& ctl) {
  if (a < 0.0 || a > b) {
    throw DomainError("q_integral: requires 0 <= a <= b");
  }
  if (a == b) return 0.0;
  return q_integral_zero(f, b, q, ctl) - q_integral_zero(f, a, q, ctl);
}

double q_derivative(const ScalarFn& f, double t, double q,
                    const SeriesControl& ctl) {
  check_scale_index(q);
  ctl.validate();
  if (t < 0.0) throw DomainError("q_derivative: requires t >= 0");
  if (t > 0.0) return (f(q * t) - f(t)) / ((q - 1.0) * t);

  // Lattice limit with probe point 1. Once the probe is so close to zero that
  // rounding in f(p) - f(0) exceeds the quotient change, the sequence cannot
  // settle any further and the last quotient is accepted.
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double f0 = f(0.0);
  double previous = f(1.0) - f0;
  for (int n = 1; n < ctl.max_terms; ++n) {
    const double probe = std::pow(q, n);
    const double fp = f(probe);
    const double quotient = (fp - f0) / probe;
    const double change = std::abs(quotient - previous);
    const double noise = 4.0 * kEps * (std::abs(f0) + std::abs(fp)) / probe;
    if (change < ctl.rel_tol * (1.0 + std::abs(quotient)) || change < noise) {
      return quotient;
    }
    previous = quotient;
  }
  throw ConvergenceError("q_derivative: limit at t = 0 did not settle");
}

double q_derivative_n(const ScalarFn& f, double t, double q, int n,
                      const SeriesControl& ctl) {
  check_scale_index(q);
  if (n < 1) throw DomainError("q_derivative_n: order must be >= 1");
  if (t < 0.0) throw DomainError("q_derivative_n: requires t >= 0");
  if (n == 1) return q_derivative(f, t, q, ctl);

  if (t == 0.0) {
    const ScalarFn inner = [&](double u) {
      return q_derivative_n(f, u, q, n - 1, ctl);
    };
    return q_derivative(inner, 0.0, q, ctl);
  }

  // ((1-q) t)^{-n} sum_k (-1)^k q^{-k(k-1)/2 - k(n-k)} [n k]_q f(q^k t)
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double weight =
        sign * std::pow(q, -0.5 * k * (k - 1) - k * (n - k)) *
        q_binomial(n, k, q);
    sum += weight * f(std::pow(q, k) * t);
  }
  return sum / std::pow((1.0 - q) * t, n);
}

}  // namespace qfde
