#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "qfde/errors.hpp"
#include "qfde/qfrac.hpp"

using namespace qfde;
using doctest::Approx;

namespace {

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// Caputo derivative of t^beta, beta > 0.
double power_rule(double beta, double alpha, double t, double q) {
  return q_gamma(beta + 1, q) / q_gamma(beta + 1 - alpha, q) *
         std::pow(t, beta - alpha);
}

}  // namespace

TEST_CASE("FracOrder") {
  CHECK(FracOrder(0.25).value() == 0.25);
  CHECK_THROWS_AS(FracOrder(0.0), DomainError);
  CHECK_THROWS_AS(FracOrder(1.0), DomainError);
  CHECK_THROWS_AS(FracOrder(std::nan("")), DomainError);
}

TEST_CASE("frac_q_integral") {
  const ScalarFn one = [](double) { return 1.0; };
  const ScalarFn sq = [](double t) { return t * t; };

  CHECK(frac_q_integral(sq, 0.0, 1.7, 0.5) == Approx(1.7 * 1.7));
  CHECK(frac_q_integral(one, 0.5, 0.0, 0.5) == 0.0);

  // I^a 1 = t^a / Gamma_q(a+1)
  for (double q : {0.25, 0.5, 0.8}) {
    for (double a : {0.3, 0.5, 1.5}) {
      CHECK(rel_diff(frac_q_integral(one, a, 2.0, q),
                     std::pow(2.0, a) / q_gamma(a + 1, q)) <= 1e-11);
    }
  }
  // I^1 is the plain q-integral
  CHECK(frac_q_integral(sq, 1.0, 1.0, 0.5) ==
        Approx(q_integral_zero(sq, 1.0, 0.5)).epsilon(1e-12));

  CHECK_THROWS_AS(frac_q_integral(one, 0.5, -1.0, 0.5), DomainError);
  CHECK_THROWS_AS(frac_q_integral(one, 0.5, 1.0, 0.5, {}, 0.1),
                  NotSupportedError);
}

TEST_CASE("caputo_q_derivative power rule") {
  const double q = 0.5, a = 0.5;
  const ScalarFn sq = [](double t) { return t * t; };
  const double ref = oracle::to_double(oracle::caputo(
      [](const oracle::Real& t) { return t * t; }, oracle::Real(a),
      oracle::Real(1), oracle::Real(q), 400));
  CHECK(rel_diff(caputo_q_derivative(sq, a, 1.0, q), ref) <= 1e-11);
  CHECK(rel_diff(power_rule(2, a, 1.0, q), ref) <= 1e-11);

  for (double qq : {0.25, 2.0 / 3.0, 0.9}) {
    for (double aa : {0.2, 0.5, 2.0 / 3.0}) {
      for (double beta : {1.0, 2.0, 2.5}) {
        const ScalarFn f = [beta](double t) { return std::pow(t, beta); };
        CHECK(rel_diff(caputo_q_derivative(f, aa, 0.7, qq),
                       power_rule(beta, aa, 0.7, qq)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("the right-hand side of the quadratic-plus-linear test problem") {
  // Caputo derivative of t^2 + t + 1 carries 1/Gamma_q(3 - alpha), not
  // 1/Gamma_q(2 - alpha), in front of t^{2 - alpha}.
  const double q = 0.25, a = 0.5, t = 0.3;
  const ScalarFn x = [](double s) { return s * s + s + 1; };
  const double lhs = caputo_q_derivative(x, a, t, q);
  const double right = (1 + q) / q_gamma(3 - a, q) * std::pow(t, 2 - a) +
                       std::pow(t, 1 - a) / q_gamma(2 - a, q);
  const double wrong = (1 + q) / q_gamma(2 - a, q) * std::pow(t, 2 - a) +
                       std::pow(t, 1 - a) / q_gamma(2 - a, q);
  CHECK(rel_diff(lhs, right) <= 1e-11);
  CHECK(rel_diff(lhs, wrong) > 1e-3);
}

TEST_CASE("Caputo and Riemann-Liouville derivatives") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), tt(0.1, 2.0),
      qd(0.2, 0.8), ad(0.1, 0.9);

  SUBCASE("differ by the f(0) t^{-alpha} term") {
    for (int i = 0; i < 40; ++i) {
      const double c0 = u(rng), c1 = u(rng), c2 = u(rng);
      const ScalarFn f = [=](double s) { return c0 + c1 * s + c2 * s * s; };
      const double t = tt(rng), q = qd(rng), a = ad(rng);
      const double c = caputo_q_derivative(f, a, t, q);
      const double rl = rl_q_derivative(f, a, t, q);
      const double jump = c0 * std::pow(t, -a) / q_gamma(1 - a, q);
      CHECK(std::abs(rl - c - jump) <= 1e-7 * (1 + std::abs(c)));
    }
  }

  SUBCASE("Caputo vanishes on constants") {
    const ScalarFn k = [](double) { return 3.5; };
    CHECK(caputo_q_derivative(k, 0.4, 1.2, 0.5) == 0.0);
  }

  SUBCASE("linearity") {
    const ScalarFn f = [](double s) { return std::exp(s); };
    const ScalarFn g = [](double s) { return s * s * s; };
    const ScalarFn h = [&](double s) { return 2 * f(s) - g(s); };
    const double lhs = caputo_q_derivative(h, 0.3, 0.8, 0.6);
    const double rhs = 2 * caputo_q_derivative(f, 0.3, 0.8, 0.6) -
                       caputo_q_derivative(g, 0.3, 0.8, 0.6);
    CHECK(lhs == Approx(rhs).epsilon(1e-12));
  }

  SUBCASE("nonpositive orders are integrals") {
    const ScalarFn f = [](double s) { return s; };
    CHECK(caputo_q_derivative(f, -0.5, 1.0, 0.5) ==
          frac_q_integral(f, 0.5, 1.0, 0.5));
    CHECK(rl_q_derivative(f, -0.5, 1.0, 0.5) ==
          frac_q_integral(f, 0.5, 1.0, 0.5));
  }

  SUBCASE("unsupported inputs") {
    const ScalarFn f = [](double s) { return s; };
    CHECK_THROWS_AS(caputo_q_derivative(f, 1.0, 1.0, 0.5), NotSupportedError);
    CHECK_THROWS_AS(rl_q_derivative(f, 1.5, 1.0, 0.5), NotSupportedError);
    CHECK_THROWS_AS(caputo_q_derivative(f, 0.5, 1.0, 0.5, {}, 0.2),
                    NotSupportedError);
    CHECK_THROWS_AS(caputo_q_derivative(f, 0.5, 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(rl_q_derivative(f, 0.5, -1.0, 0.5), DomainError);
  }
}
