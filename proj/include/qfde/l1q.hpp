#pragma once

// The L1,q discretisation of the Caputo q-derivative on the geometric mesh
// t_0 = 0, t_k = b q^{N-k} (1 <= k <= N).

#include <span>
#include <vector>

#include "qfde/qcore.hpp"
#include "qfde/qfrac.hpp"

namespace qfde {

using Vec = std::vector<double>;

class QMesh {
 public:
  /// Throws DomainError when N < 1.
  QMesh(const QScale& scale, int N);

  const QScale& scale() const { return scale_; }
  int size() const { return N_; }
  /// t_k for 0 <= k <= N.
  double node(int k) const { return nodes_.at(k); }
  /// Delta t_k = t_k - t_{k-1} for 1 <= k <= N.
  double step(int k) const { return steps_.at(k - 1); }
  const std::vector<double>& nodes() const { return nodes_; }

 private:
  QScale scale_;
  int N_;
  std::vector<double> nodes_;
  std::vector<double> steps_;
};

inline QMesh build_mesh(const QScale& scale, int N) { return QMesh(scale, N); }

/// How the first weight b_1 is obtained.
enum class FirstWeight {
  /// The Jackson series over [0, t_1]; consistent with t_0 = 0.
  series,
  /// The lattice closed form (t_n - q t_1)^{(-alpha)}, i.e. the same rule as
  /// every other weight, which treats t_0 as q t_1 instead of 0.
  lattice,
};

/// Weights b_1..b_n for target node n.
class L1qCoefficients {
 public:
  L1qCoefficients(int n, FracOrder alpha, std::vector<double> weights);

  int n() const { return n_; }
  FracOrder alpha() const { return alpha_; }
  /// b_k for 1 <= k <= n.
  double weight(int k) const { return weights_.at(k - 1); }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int n_;
  FracOrder alpha_;
  std::vector<double> weights_;
};

/// Computes b_1..b_n. b_k = (t_n - q t_k)^{(-alpha)} for k >= 2; b_1 per
/// `first`. Throws InvariantError if t_n^{-alpha} < b_1 < ... < b_n fails.
L1qCoefficients coefficients(const QMesh& mesh, int n, FracOrder alpha,
                             const SeriesControl& ctl = {},
                             FirstWeight first = FirstWeight::series);

/// All coefficient sets for n = 1..N of one (mesh, alpha) pair. Immutable
/// once built, so one table can serve concurrent readers.
class CoefficientTable {
 public:
  CoefficientTable(const QMesh& mesh, FracOrder alpha,
                   const SeriesControl& ctl = {},
                   FirstWeight first = FirstWeight::series);

  const L1qCoefficients& at(int n) const { return sets_.at(n - 1); }
  /// Gamma_q(1 - alpha).
  double gamma_one_minus_alpha() const { return gamma_; }

 private:
  std::vector<L1qCoefficients> sets_;
  double gamma_;
};

/// Delta_q^alpha x^n = 1/Gamma_q(1-alpha) sum_k b_k (x^k - x^{k-1}),
/// componentwise. `samples` holds x^0..x^n.
Vec l1q_apply(std::span<const Vec> samples, const L1qCoefficients& coeffs,
              double q, const SeriesControl& ctl = {});

/// Scalar convenience overload.
double l1q_apply(std::span<const double> samples,
                 const L1qCoefficients& coeffs, double q,
                 const SeriesControl& ctl = {});

/// b_n x^n = init x^0 + sum_k history[k-1] x^k + Gamma_q(1-alpha) f^n.
struct StepWeights {
  double lead;                  // b_n
  std::vector<double> history;  // b_{k+1} - b_k, k = 1..n-1
  double init;                  // b_1
};

StepWeights rearranged_step_weights(const L1qCoefficients& coeffs);

struct TruncationBound {
  int n;
  double value;
  double m2;  // max |D_q^2 x| on [0, t_n]
};

/// m2 t_n^{-alpha} dt_n^2 / (4 Gamma_q(1-alpha) (1-q^2) (q^alpha - q)).
TruncationBound truncation_bound(const QMesh& mesh, int n, FracOrder alpha,
                                 double m2, const SeriesControl& ctl = {});

}  // namespace qfde
