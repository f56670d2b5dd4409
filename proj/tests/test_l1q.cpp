#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "qfde/errors.hpp"
#include "qfde/l1q.hpp"
#include "qfde/qfrac.hpp"

using namespace qfde;
using doctest::Approx;

namespace {

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

std::vector<double> sample(const ScalarFn& x, const QMesh& mesh, int n) {
  std::vector<double> out;
  for (int k = 0; k <= n; ++k) out.push_back(x(mesh.node(k)));
  return out;
}

}  // namespace

TEST_CASE("QMesh") {
  const QMesh mesh(QScale(0.5, 1.0), 3);
  CHECK(mesh.size() == 3);
  CHECK(mesh.nodes() == std::vector<double>{0.0, 0.25, 0.5, 1.0});
  CHECK(mesh.step(1) == 0.25);
  CHECK(mesh.step(3) == 0.5);
  CHECK_THROWS_AS(QMesh(QScale(0.5, 1.0), 0), DomainError);
  CHECK_THROWS(mesh.node(4));

  const QMesh big = build_mesh(QScale(2.0 / 3.0, 2.0), 40);
  CHECK(big.node(40) == 2.0);
  for (int k = 2; k <= 40; ++k) {
    CHECK(big.node(k - 1) == Approx(big.node(k) * 2.0 / 3.0).epsilon(1e-15));
    CHECK(big.step(k) == Approx((1 - 2.0 / 3.0) * big.node(k)).epsilon(1e-13));
  }
  CHECK(big.step(1) == big.node(1));
}

TEST_CASE("coefficients") {
  const double q = 0.5, a = 0.5;
  const QMesh mesh(QScale(q, 1.0), 3);
  const auto c = coefficients(mesh, 3, FracOrder(a));
  const oracle::Real qr(q), ar(a);

  SUBCASE("b_3 is the kernel at s = t_3") {
    const double ref = oracle::to_double(
        oracle::shifted_factorial(1, qr * 1, -ar, qr, 400));
    CHECK(rel_diff(c.weight(3), ref) <= 1e-13);
  }

  SUBCASE("b_k is the averaged kernel over [t_{k-1}, t_k]") {
    const double tn = mesh.node(3);
    auto avg = [&](int k) {
      const ScalarFn kern = [&](double s) {
        return shifted_factorial_real(tn, q * s, -a, q);
      };
      return q_integral(kern, mesh.node(k - 1), mesh.node(k), q) / mesh.step(k);
    };
    CHECK(rel_diff(c.weight(2), avg(2)) <= 1e-12);
    CHECK(rel_diff(c.weight(1), avg(1)) <= 1e-12);

    // b_1 by an independent extended-precision series
    const oracle::Real t1(mesh.node(1));
    const oracle::Real b1 =
        oracle::jackson([&](const oracle::Real& s) {
          return oracle::shifted_factorial(1, qr * s, -ar, qr);
        }, t1, qr, 300) / t1;
    CHECK(rel_diff(c.weight(1), oracle::to_double(b1)) <= 1e-12);
  }

  SUBCASE("closed form equals the averaged kernel on a grid") {
    for (double qq : {0.25, 2.0 / 3.0, 0.9}) {
      for (double aa : {0.1, 0.5, 0.9}) {
        const QMesh m(QScale(qq, 1.5), 8);
        for (int n : {2, 5, 8}) {
          const auto cc = coefficients(m, n, FracOrder(aa));
          const double tn = m.node(n);
          const ScalarFn kern = [&](double s) {
            return shifted_factorial_real(tn, qq * s, -aa, qq);
          };
          for (int k = 1; k <= n; ++k) {
            const double ref =
                q_integral(kern, m.node(k - 1), m.node(k), qq) / m.step(k);
            CHECK(rel_diff(cc.weight(k), ref) <= 1e-11);
          }
        }
      }
    }
  }

  SUBCASE("t_n^{-alpha} < b_1 < ... < b_n") {
    for (auto first : {FirstWeight::series, FirstWeight::lattice}) {
      const QMesh m(QScale(0.8, 1.0), 30);
      const CoefficientTable table(m, FracOrder(0.7), {}, first);
      for (int n = 1; n <= 30; ++n) {
        const auto& cc = table.at(n);
        CHECK(cc.weight(1) > std::pow(m.node(n), -0.7));
        for (int k = 2; k <= n; ++k) CHECK(cc.weight(k) > cc.weight(k - 1));
      }
    }
  }

  SUBCASE("the lattice first weight is the kernel at t_1") {
    const auto lat = coefficients(mesh, 3, FracOrder(a), {}, FirstWeight::lattice);
    CHECK(lat.weight(1) ==
          shifted_factorial_real(mesh.node(3), q * mesh.node(1), -a, q));
    CHECK(lat.weight(2) == c.weight(2));
    CHECK(lat.weight(1) > c.weight(1));
  }

  CHECK_THROWS_AS(coefficients(mesh, 0, FracOrder(a)), DomainError);
  CHECK_THROWS_AS(coefficients(mesh, 4, FracOrder(a)), DomainError);
  CHECK_THROWS_AS(L1qCoefficients(2, FracOrder(a), {1.0}), LengthError);
}

TEST_CASE("kernel identity and bound") {
  // D_q of (t - s)^{(-alpha)} in s equals -[-alpha]_q (t - qs)^{(-alpha-1)},
  // and |(t - qs)^{(-alpha-1)}| <= t^{-alpha-1} / ((1-q^a)(1-q^{1-a})).
  for (double q : {0.3, 0.5, 0.8}) {
    for (double a : {0.2, 0.5, 0.8}) {
      const double t = 1.7;
      const ScalarFn k = [&](double s) { return shifted_factorial_real(t, s, -a, q); };
      const double bracket = (1 - std::pow(q, -a)) / (1 - q);
      const double cap =
          std::pow(t, -a - 1) / ((1 - std::pow(q, a)) * (1 - std::pow(q, 1 - a)));
      for (int j = 1; j <= 12; ++j) {
        const double s = t * std::pow(q, j);
        const double rhs = -bracket * shifted_factorial_real(t, q * s, -a - 1, q);
        CHECK(rel_diff(q_derivative(k, s, q), rhs) <= 1e-9);
        CHECK(std::abs(shifted_factorial_real(t, q * s, -a - 1, q)) <= cap);
      }
    }
  }
}

TEST_CASE("l1q_apply") {
  const double q = 0.5, a = 0.5;
  const QMesh mesh(QScale(q, 1.0), 3);
  const auto c = coefficients(mesh, 3, FracOrder(a));

  const std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
  CHECK(l1q_apply(flat, c, q) == 0.0);

  const std::vector<double> step{0.0, 1.0, 1.0, 1.0};
  CHECK(l1q_apply(step, c, q) ==
        Approx(c.weight(1) / q_gamma(0.5, q)).epsilon(1e-15));

  const std::vector<Vec> pair{{0, 0}, {1, 2}, {1, 2}, {1, 2}};
  const Vec v = l1q_apply(std::span<const Vec>(pair), c, q);
  CHECK(v[1] == Approx(2 * v[0]).epsilon(1e-15));

  const std::vector<double> short_samples{0.0, 1.0};
  CHECK_THROWS_AS(l1q_apply(short_samples, c, q), LengthError);
  const std::vector<Vec> ragged{{0}, {1, 2}, {1}, {1}};
  CHECK_THROWS_AS(l1q_apply(std::span<const Vec>(ragged), c, q), LengthError);

  SUBCASE("exact on affine functions with the series first weight") {
    for (double qq : {0.3, 2.0 / 3.0}) {
      for (double aa : {0.25, 0.75}) {
        const QMesh m(QScale(qq, 2.0), 12);
        const ScalarFn x = [](double t) { return 3.0 - 1.5 * t; };
        for (int n : {1, 6, 12}) {
          const auto cc = coefficients(m, n, FracOrder(aa));
          const double got = l1q_apply(sample(x, m, n), cc, qq);
          const double exact = caputo_q_derivative(x, aa, m.node(n), qq);
          CHECK(rel_diff(got, exact) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("rearranged_step_weights") {
  const QMesh mesh(QScale(0.6, 1.0), 5);
  const auto c = coefficients(mesh, 5, FracOrder(0.4));
  const auto w = rearranged_step_weights(c);
  CHECK(w.lead == c.weight(5));
  CHECK(w.init == c.weight(1));
  REQUIRE(w.history.size() == 4);
  for (int k = 1; k <= 4; ++k) {
    CHECK(w.history[k - 1] == c.weight(k + 1) - c.weight(k));
    CHECK(w.history[k - 1] > 0.0);
  }
  // b_n x^n - sum_k b_k (x^k - x^{k-1}) = init x^0 + sum history x^k
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> x(6);
  for (double& v : x) v = u(rng);
  double diff = 0.0;
  for (int k = 1; k <= 5; ++k) diff += c.weight(k) * (x[k] - x[k - 1]);
  double rhs = w.init * x[0];
  for (int k = 1; k <= 4; ++k) rhs += w.history[k - 1] * x[k];
  CHECK(w.lead * x[5] - diff == Approx(rhs).epsilon(1e-13));
}

TEST_CASE("truncation_bound") {
  const double q = 0.5, a = 0.5;
  const QMesh mesh(QScale(q, 1.0), 4);
  const auto tb = truncation_bound(mesh, 4, FracOrder(a), 1.5);
  const double expected = 1.5 * 0.25 /
                          (4 * q_gamma(0.5, q) * 0.75 * (std::sqrt(0.5) - 0.5));
  CHECK(tb.value == Approx(expected).epsilon(1e-14));
  CHECK(tb.n == 4);
  CHECK(tb.m2 == 1.5);
  CHECK(truncation_bound(mesh, 2, FracOrder(a), 0.0).value == 0.0);
  CHECK_THROWS_AS(truncation_bound(mesh, 5, FracOrder(a), 1.0), DomainError);
  CHECK_THROWS_AS(truncation_bound(mesh, 1, FracOrder(a), -1.0), DomainError);

  SUBCASE("dominates the local error for t^2 and t^3") {
    for (double qq : {0.25, 0.5, 2.0 / 3.0, 0.9}) {
      for (double aa : {0.2, 0.5, 2.0 / 3.0, 0.9}) {
        if (std::pow(qq, aa) - qq <= 0) continue;
        const QMesh m(QScale(qq, 1.0), 10);
        const ScalarFn sq = [](double t) { return t * t; };
        const ScalarFn cube = [](double t) { return t * t * t; };
        const double m2_sq = 1 + qq;
        const double m2_cube = (1 + qq + qq * qq) * (1 + qq);  // on [0, 1]
        for (int n = 1; n <= 10; ++n) {
          const auto cc = coefficients(m, n, FracOrder(aa));
          const double tn = m.node(n);
          const double r_sq = std::abs(caputo_q_derivative(sq, aa, tn, qq) -
                                       l1q_apply(sample(sq, m, n), cc, qq));
          const double r_cube = std::abs(caputo_q_derivative(cube, aa, tn, qq) -
                                         l1q_apply(sample(cube, m, n), cc, qq));
          CHECK(r_sq <= truncation_bound(m, n, FracOrder(aa), m2_sq).value);
          CHECK(r_cube <= truncation_bound(m, n, FracOrder(aa), m2_cube).value);
        }
      }
    }
  }
}
