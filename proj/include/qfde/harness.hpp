#pragma once

// Experiment harness behind the `qfde` command-line tool: a registry of test
// problems, the solve / convergence / bounds runners and the CSV and table
// emitters.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qfde/solver.hpp"

namespace qfde::harness {

/// Parses "2/3", "0.25" or "1e-1" into a double. Fractions are split into
/// numerator and denominator and divided once. Throws DomainError.
double parse_rational(const std::string& text);

struct RegisteredProblem {
  std::string name;
  IVProblem problem;
  /// max |D_q^2 x| of the exact solution, when known in closed form.
  std::optional<double> m2;
  std::string description;
};

std::vector<std::string> problem_names();

/// Instantiates a registry problem for scale index q and order alpha.
/// Throws DomainError on an unknown name.
RegisteredProblem make_problem(const std::string& name, double q, double alpha,
                               const SeriesControl& ctl = {});

struct ProblemSpec {
  std::string name;
  double q = 0.5;
  double alpha = 0.5;
  double b = 1.0;
  int N = 10;
  SolverConfig config;

  void validate() const;
};

struct RunRow {
  double t = 0.0;
  Vec x_num;
  std::optional<Vec> x_exact;
  std::optional<double> abs_err;
  int fp_iters = 0;

  bool operator==(const RunRow&) const = default;
};

struct RunMetadata {
  std::string problem;
  double q = 0.0;
  double alpha = 0.0;
  double b = 0.0;
  int N = 0;
  std::uint64_t config_hash = 0;
  double wall_time_s = 0.0;
};

struct RunRecord {
  RunMetadata metadata;
  /// Ascending t_n; one row per completed step.
  std::vector<RunRow> rows;
  /// Set when the solver stopped early; rows then hold the completed steps.
  std::optional<std::string> failure;
  int failed_step = 0;
};

/// FNV-1a hash of the solver configuration.
std::uint64_t config_hash(const SolverConfig& config);

RunRecord run_solve(const ProblemSpec& spec);

/// Header t,x_num[,x_exact,abs_err],fp_iters; %.16e floats; LF endings.
/// Vector states use x_num[i] / x_exact[i] columns.
void write_csv(std::ostream& out, const RunRecord& record);
std::vector<RunRow> read_csv(std::istream& in);

void write_table(std::ostream& out, const RunRecord& record);

struct ConvergenceSummary {
  std::vector<int> N_list;
  std::vector<RunRecord> records;
  /// Max |e_n| over 1 <= n <= (1 - delta) N, per N.
  std::vector<double> max_errors;
  /// max_n |e_n| / q^{2(N-n)}, per N.
  std::vector<double> rate_constants;
  /// -slope of the least-squares line through (N, ln max_error).
  std::optional<double> fitted_decay;
  double expected_decay = 0.0;  // 2 delta ln(1/q)
  bool exact = false;
  std::vector<std::string> warnings;
};

/// Solves once per N (concurrently) and fits the decay of the early-node
/// error. Throws DomainError without an exact solution or with N < 2.
ConvergenceSummary run_convergence(const ProblemSpec& spec,
                                   const std::vector<int>& N_list,
                                   double delta);

void write_convergence(std::ostream& out, const ConvergenceSummary& summary);

struct BoundRow {
  double t;
  double abs_err;
  double bound;
  double ratio;
};

struct BoundsReport {
  RunRecord record;
  double m2 = 0.0;
  bool m2_estimated = false;
  double L1 = 0.0;
  bool lipschitz_known = false;
  std::vector<BoundRow> rows;
  double max_state = 0.0;
  double stability = 0.0;
  bool violated = false;
};

/// max over mesh nodes of |D_q^2 x(t_n)| for the exact solution.
double estimate_m2(const VecFn& exact, const QMesh& mesh,
                   const SeriesControl& ctl = {});

/// Compares errors with the a-priori error bound and the state with the
/// stability bound. Problems without a Lipschitz constant use L1 = 0.
BoundsReport run_bounds(const ProblemSpec& spec,
                        std::optional<double> m2 = std::nullopt);

void write_bounds(std::ostream& out, const BoundsReport& report);

}  // namespace qfde::harness
