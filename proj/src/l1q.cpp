#include "qfde/l1q.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qfde/errors.hpp"

namespace qfde {

QMesh::QMesh(const QScale& scale, int N) : scale_(scale), N_(N) {
  if (N < 1) throw DomainError("mesh needs N >= 1 nodes");
  const double q = scale.q();
  const double b = scale.b();
  nodes_.resize(N + 1);
  nodes_[0] = 0.0;
  for (int k = 1; k <= N; ++k) nodes_[k] = b * std::pow(q, N - k);
  steps_.resize(N);
  for (int k = 1; k <= N; ++k) steps_[k - 1] = nodes_[k] - nodes_[k - 1];
}

L1qCoefficients::L1qCoefficients(int n, FracOrder alpha,
                                 std::vector<double> weights)
    : n_(n), alpha_(alpha), weights_(std::move(weights)) {
  if (n < 1 || static_cast<int>(weights_.size()) != n) {
    throw LengthError("coefficient set must hold exactly n weights");
  }
}

namespace {

// (t_n - q s)^{(-alpha)}
double kernel(double tn, double s, double alpha, double q,
              const SeriesControl& ctl) {
  return shifted_factorial_real(tn, q * s, -alpha, q, ctl);
}

// b_1 = (1-q) sum_i q^i (t_n - q^{i+1} t_1)^{(-alpha)}
double first_weight_series(double tn, double t1, double alpha, double q,
                           const SeriesControl& ctl) {
  double sum = 0.0;
  int quiet = 0;
  for (int i = 0; i < ctl.max_terms; ++i) {
    const double qi = std::pow(q, i);
    const double term = (1.0 - q) * qi * kernel(tn, qi * t1, alpha, q, ctl);
    sum += term;
    quiet = std::abs(term) < ctl.rel_tol * std::abs(sum) ? quiet + 1 : 0;
    if (quiet == 3) return sum;
  }
  throw ConvergenceError("b_1 series did not converge");
}

}  // namespace

L1qCoefficients coefficients(const QMesh& mesh, int n, FracOrder alpha,
                             const SeriesControl& ctl, FirstWeight first) {
  ctl.validate();
  if (n < 1 || n > mesh.size()) {
    throw DomainError("coefficients: node index out of range");
  }
  const double q = mesh.scale().q();
  const double a = alpha.value();
  const double tn = mesh.node(n);

  std::vector<double> weights(n);
  weights[0] = first == FirstWeight::series
                   ? first_weight_series(tn, mesh.node(1), a, q, ctl)
                   : kernel(tn, mesh.node(1), a, q, ctl);
  for (int k = 2; k <= n; ++k) weights[k - 1] = kernel(tn, mesh.node(k), a, q, ctl);

  // Strict in exact arithmetic; neighbours may round to the same double once
  // t_1 / t_n drops below machine precision, so ties within a few ulps pass.
  const double slack = 1.0 - 8.0 * std::numeric_limits<double>::epsilon();
  if (!(weights[0] >= std::pow(tn, -a) * slack)) {
    throw InvariantError("b_1 does not exceed t_n^{-alpha} at n = " +
                         std::to_string(n));
  }
  for (int k = 1; k < n; ++k) {
    if (!(weights[k] >= weights[k - 1] * slack)) {
      throw InvariantError("L1,q weights not strictly increasing at n = " +
                           std::to_string(n) + ", k = " + std::to_string(k + 1));
    }
  }
  return L1qCoefficients(n, alpha, std::move(weights));
}

CoefficientTable::CoefficientTable(const QMesh& mesh, FracOrder alpha,
                                   const SeriesControl& ctl, FirstWeight first)
    : gamma_(q_gamma(1.0 - alpha.value(), mesh.scale().q(), ctl)) {
  sets_.reserve(mesh.size());
  for (int n = 1; n <= mesh.size(); ++n) {
    sets_.push_back(coefficients(mesh, n, alpha, ctl, first));
  }
}

Vec l1q_apply(std::span<const Vec> samples, const L1qCoefficients& coeffs,
              double q, const SeriesControl& ctl) {
  const int n = coeffs.n();
  if (static_cast<int>(samples.size()) != n + 1) {
    throw LengthError("l1q_apply: expected " + std::to_string(n + 1) +
                      " samples, got " + std::to_string(samples.size()));
  }
  const std::size_t d = samples.front().size();
  for (const Vec& x : samples) {
    if (x.size() != d) throw LengthError("l1q_apply: ragged sample vectors");
  }
  Vec out(d, 0.0);
  for (int k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      out[i] += coeffs.weight(k) * (samples[k][i] - samples[k - 1][i]);
    }
  }
  const double gamma = q_gamma(1.0 - coeffs.alpha().value(), q, ctl);
  for (double& v : out) v /= gamma;
  return out;
}

double l1q_apply(std::span<const double> samples,
                 const L1qCoefficients& coeffs, double q,
                 const SeriesControl& ctl) {
  std::vector<Vec> wrapped;
  wrapped.reserve(samples.size());
  for (double x : samples) wrapped.push_back({x});
  return l1q_apply(std::span<const Vec>(wrapped), coeffs, q, ctl).front();
}

StepWeights rearranged_step_weights(const L1qCoefficients& coeffs) {
  const int n = coeffs.n();
  StepWeights w{coeffs.weight(n), {}, coeffs.weight(1)};
  w.history.reserve(n - 1);
  for (int k = 1; k < n; ++k) {
    w.history.push_back(coeffs.weight(k + 1) - coeffs.weight(k));
  }
  return w;
}

TruncationBound truncation_bound(const QMesh& mesh, int n, FracOrder alpha,
                                 double m2, const SeriesControl& ctl) {
  if (n < 1 || n > mesh.size()) {
    throw DomainError("truncation_bound: node index out of range");
  }
  if (m2 < 0.0) throw DomainError("truncation_bound: m2 must be >= 0");
  const double q = mesh.scale().q();
  const double a = alpha.value();
  const double dt = mesh.step(n);
  const double denom = 4.0 * q_gamma(1.0 - a, q, ctl) * (1.0 - q * q) *
                       (std::pow(q, a) - q);
  return {n, m2 * std::pow(mesh.node(n), -a) * dt * dt / denom, m2};
}

}  // namespace qfde
