#pragma once

// Implicit L1,q time stepping for  cD_q^alpha x(t) = f(t, x(t)),  x(0) = x0,
// on the geometric mesh, with a fixed-point inner iteration per step.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qfde/errors.hpp"
#include "qfde/l1q.hpp"

namespace qfde {

using Rhs = std::function<Vec(double t, const Vec& x)>;
using VecFn = std::function<Vec(double t)>;

double max_norm(std::span<const double> v);

struct IVProblem {
  Rhs f;
  FracOrder alpha;
  Vec x0;
  std::optional<double> lipschitz_L;
  /// Exact solution, when known. Empty otherwise.
  VecFn exact;

  std::size_t dim() const { return x0.size(); }
  void validate() const;
};

struct SolverConfig {
  double fp_tol = 1e-13;
  int max_fp_iters = 200;
  /// Relative and absolute offset applied to x^{n-1} to form x^{n,0}.
  double start_perturbation = 1e-8;
  SeriesControl series;
  FirstWeight first_weight = FirstWeight::series;

  void validate() const;
};

struct SolveTrace {
  QMesh mesh;
  /// x^0..x^N; shorter when a solve stopped early.
  std::vector<Vec> states;
  /// Per step n = 1..N (index n-1): map applications used.
  std::vector<int> fp_iterations;
  /// Per step: the last fixed-point increment (max-norm).
  std::vector<double> residuals;
  /// Per step: every increment |x^{n,l} - x^{n,l-1}|, l = 1, 2, ...
  std::vector<std::vector<double>> increments;
  std::optional<double> contraction_L1;
};

/// Fixed-point failure at one step. Carries the trace up to step - 1.
class SolveError : public ConvergenceError {
 public:
  SolveError(int step, SolveTrace partial, const std::string& what);

  int step() const { return step_; }
  const SolveTrace& partial() const { return partial_; }

 private:
  int step_;
  SolveTrace partial_;
};

/// L1 = L Gamma_q(1 - alpha) b^alpha.
double contraction_constant(double L, FracOrder alpha, const QScale& scale,
                            const SeriesControl& ctl = {});

SolveTrace solve_ivp(const IVProblem& problem, const QScale& scale, int N,
                     const SolverConfig& config = {});

/// Explicit recurrence for Delta_q^alpha x^n = f^n with f^1..f^N given.
SolveTrace solve_linear_history(std::span<const Vec> fsamples, const Vec& x0,
                                FracOrder alpha, const QScale& scale, int N,
                                const SeriesControl& ctl = {},
                                FirstWeight first = FirstWeight::series);

/// 1/(1-L1) [ |x0| + Gamma_q(1-alpha) t_n^alpha fmax ]. With L1 = 0 this is
/// the unconditional bound of the linear scheme.
double stability_bound(const Vec& x0, double fmax, double t_n, FracOrder alpha,
                       double q, double L1, const SeriesControl& ctl = {});

struct ErrorReport {
  /// Per node n = 1..N (index n-1).
  std::vector<double> abs_err;
  std::vector<double> bound;
  /// |e_n| / q^{2(N-n)}
  std::vector<double> rate_constants;
};

/// Errors against problem.exact plus the a-priori bound
/// 1/(1-L1) * 1/4 * 1/(1-q^2) * 1/(q^alpha-q) * dt_n^2 * m2.
ErrorReport error_report(const SolveTrace& trace, const IVProblem& problem,
                         double m2, double L1);

}  // namespace qfde
