#include "qfde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfde {

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void IVProblem::validate() const {
  if (!f) throw DomainError("problem has no right-hand side");
  if (x0.empty()) throw DomainError("problem dimension must be >= 1");
  if (lipschitz_L && *lipschitz_L < 0.0) {
    throw DomainError("Lipschitz constant must be >= 0");
  }
}

void SolverConfig::validate() const {
  if (!(fp_tol > 0.0)) throw DomainError("fp_tol must be positive");
  if (max_fp_iters < 1) throw DomainError("max_fp_iters must be >= 1");
  if (!(start_perturbation >= 0.0)) {
    throw DomainError("start_perturbation must be >= 0");
  }
  series.validate();
}

SolveError::SolveError(int step, SolveTrace partial, const std::string& what)
    : ConvergenceError(what), step_(step), partial_(std::move(partial)) {}

double contraction_constant(double L, FracOrder alpha, const QScale& scale,
                            const SeriesControl& ctl) {
  if (L < 0.0) throw DomainError("Lipschitz constant must be >= 0");
  if (L == 0.0) return 0.0;
  const double a = alpha.value();
  return L * q_gamma(1.0 - a, scale.q(), ctl) * std::pow(scale.b(), a);
}

namespace {

// Known part of step n in increment form,
//   x^{n-1} - (1/b_n) sum_{k=1}^{n-1} b_k (x^k - x^{k-1}),
// which equals (b_1 x^0 + sum_k (b_{k+1} - b_k) x^k) / b_n and reproduces a
// constant history exactly.
Vec step_base(const L1qCoefficients& coeffs, const std::vector<Vec>& states) {
  const int n = coeffs.n();
  const double lead = coeffs.weight(n);
  Vec base = states[n - 1];
  for (std::size_t i = 0; i < base.size(); ++i) {
    double sum = 0.0;
    for (int k = 1; k < n; ++k) {
      sum += coeffs.weight(k) * (states[k][i] - states[k - 1][i]);
    }
    base[i] -= sum / lead;
  }
  return base;
}

Vec checked_rhs(const Rhs& f, double t, const Vec& x, int step) {
  Vec fx = f(t, x);
  if (fx.size() != x.size()) {
    throw LengthError("right-hand side returned dimension " +
                      std::to_string(fx.size()) + " at step " +
                      std::to_string(step));
  }
  return fx;
}

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

SolveTrace solve_ivp(const IVProblem& problem, const QScale& scale, int N,
                     const SolverConfig& config) {
  problem.validate();
  config.validate();
  const QMesh mesh(scale, N);
  const CoefficientTable table(mesh, problem.alpha, config.series,
                               config.first_weight);
  const double gamma = table.gamma_one_minus_alpha();
  const std::size_t d = problem.dim();

  SolveTrace trace{mesh, {problem.x0}, {}, {}, {}, std::nullopt};
  if (problem.lipschitz_L) {
    trace.contraction_L1 = contraction_constant(
        *problem.lipschitz_L, problem.alpha, scale, config.series);
  }

  const double p = config.start_perturbation;
  for (int n = 1; n <= N; ++n) {
    const double tn = mesh.node(n);
    const L1qCoefficients& coeffs = table.at(n);
    const Vec base = step_base(coeffs, trace.states);
    const double gain = gamma / coeffs.weight(n);

    Vec x = trace.states.back();
    for (double& v : x) v = v * (1.0 + p) + p;
    Vec fx = checked_rhs(problem.f, tn, x, n);

    std::vector<double> increments;
    bool converged = false;
    double residual = 0.0;
    for (int l = 1; l <= config.max_fp_iters && !converged; ++l) {
      Vec next(d);
      for (std::size_t i = 0; i < d; ++i) {
        next[i] = base[i] + gain * fx[i];
      }
      if (!all_finite(next)) break;
      double inc = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        inc = std::max(inc, std::abs(next[i] - x[i]));
      }
      increments.push_back(inc);
      residual = inc;
      x = std::move(next);
      if (inc <= config.fp_tol * (1.0 + max_norm(x))) {
        converged = true;
        break;
      }
      Vec fnext = checked_rhs(problem.f, tn, x, n);
      // Equal f values make the next iterate bit-identical to x.
      if (fnext == fx) {
        residual = 0.0;
        converged = true;
        break;
      }
      fx = std::move(fnext);
    }

    if (!converged) {
      throw SolveError(n, trace,
                       "fixed-point iteration did not converge at step " +
                           std::to_string(n) + " (t = " + std::to_string(tn) +
                           ")");
    }
    trace.fp_iterations.push_back(static_cast<int>(increments.size()));
    trace.residuals.push_back(residual);
    trace.increments.push_back(std::move(increments));
    trace.states.push_back(std::move(x));
  }
  return trace;
}

SolveTrace solve_linear_history(std::span<const Vec> fsamples, const Vec& x0,
                                FracOrder alpha, const QScale& scale, int N,
                                const SeriesControl& ctl, FirstWeight first) {
  if (static_cast<int>(fsamples.size()) != N) {
    throw LengthError("solve_linear_history: expected " + std::to_string(N) +
                      " forcing samples");
  }
  const QMesh mesh(scale, N);
  const CoefficientTable table(mesh, alpha, ctl, first);
  const double gamma = table.gamma_one_minus_alpha();

  SolveTrace trace{mesh, {x0}, {}, {}, {}, std::nullopt};
  for (int n = 1; n <= N; ++n) {
    const Vec& fn = fsamples[n - 1];
    if (fn.size() != x0.size()) {
      throw LengthError("solve_linear_history: forcing dimension mismatch");
    }
    const L1qCoefficients& coeffs = table.at(n);
    const double gain = gamma / coeffs.weight(n);
    Vec x = step_base(coeffs, trace.states);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += gain * fn[i];
    trace.states.push_back(std::move(x));
    trace.fp_iterations.push_back(0);
    trace.residuals.push_back(0.0);
    trace.increments.emplace_back();
  }
  return trace;
}

double stability_bound(const Vec& x0, double fmax, double t_n, FracOrder alpha,
                       double q, double L1, const SeriesControl& ctl) {
  if (!(L1 >= 0.0 && L1 < 1.0)) {
    throw DomainError("stability_bound: requires 0 <= L1 < 1");
  }
  const double a = alpha.value();
  const double g = q_gamma(1.0 - a, q, ctl);
  return (max_norm(x0) + g * std::pow(t_n, a) * fmax) / (1.0 - L1);
}

ErrorReport error_report(const SolveTrace& trace, const IVProblem& problem,
                         double m2, double L1) {
  if (!problem.exact) {
    throw DomainError("error_report: problem has no exact solution");
  }
  if (!(L1 >= 0.0 && L1 < 1.0)) {
    throw DomainError("error_report: requires 0 <= L1 < 1");
  }
  const QMesh& mesh = trace.mesh;
  const double q = mesh.scale().q();
  const double a = problem.alpha.value();
  const int N = mesh.size();
  const double factor =
      m2 / ((1.0 - L1) * 4.0 * (1.0 - q * q) * (std::pow(q, a) - q));

  ErrorReport report;
  const int last = static_cast<int>(trace.states.size()) - 1;
  for (int n = 1; n <= last; ++n) {
    const Vec exact = problem.exact(mesh.node(n));
    const Vec& xn = trace.states[n];
    if (exact.size() != xn.size()) {
      throw LengthError("error_report: exact solution dimension mismatch");
    }
    double err = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i) {
      err = std::max(err, std::abs(exact[i] - xn[i]));
    }
    const double dt = mesh.step(n);
    report.abs_err.push_back(err);
    report.bound.push_back(factor * dt * dt);
    report.rate_constants.push_back(err / std::pow(q, 2 * (N - n)));
  }
  return report;
}

}  // namespace qfde
