#include "qfde/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

namespace qfde::harness {

namespace {

double parse_number(const std::string& text) {
  if (text.empty()) throw DomainError("empty number");
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(value)) {
    throw DomainError("not a number: '" + text + "'");
  }
  return value;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(line);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

Vec scalar(double x) { return Vec{x}; }

}  // namespace

double parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_number(text);
  const double num = parse_number(text.substr(0, slash));
  const double den = parse_number(text.substr(slash + 1));
  if (den == 0.0) throw DomainError("zero denominator in '" + text + "'");
  return num / den;
}

std::vector<std::string> problem_names() {
  return {"example1", "example2", "constant", "manufactured-linear",
          "manufactured-quadratic"};
}

RegisteredProblem make_problem(const std::string& name, double q, double alpha,
                               const SeriesControl& ctl) {
  check_scale_index(q);
  const FracOrder order(alpha);
  const double a = alpha;

  if (name == "example1") {
    // x = t^2 + t + 1; cD_q^a x = (1+q)/G(3-a) t^{2-a} + 1/G(2-a) t^{1-a}.
    const double c2 = (1.0 + q) / q_gamma(3.0 - a, q, ctl);
    const double c1 = 1.0 / q_gamma(2.0 - a, q, ctl);
    return {name,
            {[=](double t, const Vec&) {
               return scalar(c2 * std::pow(t, 2.0 - a) +
                             c1 * std::pow(t, 1.0 - a));
             },
             order, {1.0}, 0.0,
             [](double t) { return scalar(t * t + t + 1.0); }},
            1.0 + q,
            "linear forcing with exact solution t^2 + t + 1"};
  }
  if (name == "example2") {
    // x = t^2 + 1 solves cD_q^a x = (1+q)/G(3-a) |x - 1|^{(2-a)/2}.
    const double c = (1.0 + q) / q_gamma(3.0 - a, q, ctl);
    const double p = 0.5 * (2.0 - a);
    return {name,
            {[=](double, const Vec& x) {
               return scalar(c * std::pow(std::abs(x[0] - 1.0), p));
             },
             order, {1.0}, std::nullopt,
             [](double t) { return scalar(t * t + 1.0); }},
            1.0 + q,
            "non-Lipschitz power nonlinearity with exact solution t^2 + 1"};
  }
  if (name == "constant") {
    return {name,
            {[](double, const Vec& x) { return Vec(x.size(), 0.0); }, order,
             {1.0}, 0.0, [](double) { return scalar(1.0); }},
            0.0,
            "f = 0 with x(0) = 1"};
  }
  if (name == "manufactured-linear") {
    const double c = 1.0 / q_gamma(2.0 - a, q, ctl);
    return {name,
            {[=](double t, const Vec& x) {
               return scalar(-0.25 * (x[0] - 1.0 - t) + c * std::pow(t, 1.0 - a));
             },
             order, {1.0}, 0.25,
             [](double t) { return scalar(1.0 + t); }},
            0.0,
            "Lipschitz (L = 1/4) problem with exact solution 1 + t"};
  }
  if (name == "manufactured-quadratic") {
    const double c = (1.0 + q) / q_gamma(3.0 - a, q, ctl);
    return {name,
            {[=](double t, const Vec& x) {
               return scalar(-0.25 * (x[0] - 1.0 - t * t) +
                             c * std::pow(t, 2.0 - a));
             },
             order, {1.0}, 0.25,
             [](double t) { return scalar(t * t + 1.0); }},
            1.0 + q,
            "Lipschitz (L = 1/4) problem with exact solution t^2 + 1"};
  }
  throw DomainError("unknown problem '" + name + "'");
}

void ProblemSpec::validate() const {
  (void)QScale(q, b);
  (void)FracOrder(alpha);
  if (N < 1) throw DomainError("N must be >= 1");
  config.validate();
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw DomainError("unknown problem '" + name + "'");
  }
}

std::uint64_t config_hash(const SolverConfig& config) {
  std::ostringstream canon;
  canon << format_double(config.fp_tol) << ';' << config.max_fp_iters << ';'
        << format_double(config.start_perturbation) << ';'
        << format_double(config.series.rel_tol) << ';'
        << config.series.max_terms << ';'
        << static_cast<int>(config.first_weight);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon.str()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

RunRecord record_from_trace(const SolveTrace& trace, const IVProblem& problem,
                            RunMetadata metadata) {
  RunRecord record{std::move(metadata), {}, std::nullopt, 0};
  for (std::size_t n = 1; n < trace.states.size(); ++n) {
    RunRow row;
    row.t = trace.mesh.node(static_cast<int>(n));
    row.x_num = trace.states[n];
    row.fp_iters = trace.fp_iterations[n - 1];
    if (problem.exact) {
      row.x_exact = problem.exact(row.t);
      double err = 0.0;
      for (std::size_t i = 0; i < row.x_num.size(); ++i) {
        err = std::max(err, std::abs((*row.x_exact)[i] - row.x_num[i]));
      }
      row.abs_err = err;
    }
    record.rows.push_back(std::move(row));
  }
  return record;
}

}  // namespace

RunRecord run_solve(const ProblemSpec& spec) {
  spec.validate();
  const RegisteredProblem reg =
      make_problem(spec.name, spec.q, spec.alpha, spec.config.series);
  const QScale scale(spec.q, spec.b);
  RunMetadata meta{spec.name, spec.q,  spec.alpha, spec.b,
                   spec.N,    config_hash(spec.config), 0.0};

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  try {
    const SolveTrace trace = solve_ivp(reg.problem, scale, spec.N, spec.config);
    meta.wall_time_s = elapsed();
    return record_from_trace(trace, reg.problem, meta);
  } catch (const SolveError& e) {
    meta.wall_time_s = elapsed();
    RunRecord record = record_from_trace(e.partial(), reg.problem, meta);
    record.failure = e.what();
    record.failed_step = e.step();
    return record;
  }
}

void write_csv(std::ostream& out, const RunRecord& record) {
  const std::size_t d =
      record.rows.empty() ? 1 : record.rows.front().x_num.size();
  const bool has_exact =
      !record.rows.empty() && record.rows.front().x_exact.has_value();
  auto columns = [&](const std::string& base) {
    if (d == 1) return base;
    std::string s;
    for (std::size_t i = 0; i < d; ++i) {
      if (i) s += ',';
      s += base + '[' + std::to_string(i) + ']';
    }
    return s;
  };
  out << "t," << columns("x_num");
  if (has_exact) out << ',' << columns("x_exact") << ",abs_err";
  out << ",fp_iters\n";
  for (const RunRow& row : record.rows) {
    out << format_double(row.t);
    for (double v : row.x_num) out << ',' << format_double(v);
    if (has_exact) {
      for (double v : *row.x_exact) out << ',' << format_double(v);
      out << ',' << format_double(*row.abs_err);
    }
    out << ',' << row.fp_iters << '\n';
  }
}

std::vector<RunRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("CSV: missing header");
  const auto header = split(line, ',');
  std::size_t d = 0;
  bool has_exact = false;
  for (const auto& h : header) {
    if (h.rfind("x_num", 0) == 0) ++d;
    if (h == "abs_err") has_exact = true;
  }
  const std::size_t width = 2 + d + (has_exact ? d + 1 : 0);
  if (d == 0 || header.size() != width || header.front() != "t" ||
      header.back() != "fp_iters") {
    throw DomainError("CSV: unrecognised header '" + line + "'");
  }

  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != width) {
      throw DomainError("CSV: row has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(width));
    }
    RunRow row;
    std::size_t c = 0;
    row.t = parse_number(cells[c++]);
    for (std::size_t i = 0; i < d; ++i) row.x_num.push_back(parse_number(cells[c++]));
    if (has_exact) {
      Vec exact;
      for (std::size_t i = 0; i < d; ++i) exact.push_back(parse_number(cells[c++]));
      row.x_exact = std::move(exact);
      row.abs_err = parse_number(cells[c++]);
    }
    row.fp_iters = static_cast<int>(parse_number(cells[c]));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_table(std::ostream& out, const RunRecord& record) {
  const RunMetadata& m = record.metadata;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "# problem=%s q=%.10g alpha=%.10g b=%.10g N=%d "
                "config=%016" PRIx64 " wall=%.3fs\n",
                m.problem.c_str(), m.q, m.alpha, m.b, m.N, m.config_hash,
                m.wall_time_s);
  out << buf;
  const bool has_exact =
      !record.rows.empty() && record.rows.front().x_exact.has_value();
  std::snprintf(buf, sizeof buf, "%4s %14s %18s %18s %12s %6s\n", "n", "t_n",
                "x^n", has_exact ? "x(t_n)" : "", has_exact ? "abs_err" : "",
                "iters");
  out << buf;
  int n = 1;
  for (const RunRow& row : record.rows) {
    const double x = row.x_num.front();
    if (has_exact) {
      std::snprintf(buf, sizeof buf, "%4d %14.6e %18.12f %18.12f %12.4e %6d\n",
                    n, row.t, x, row.x_exact->front(), *row.abs_err,
                    row.fp_iters);
    } else {
      std::snprintf(buf, sizeof buf, "%4d %14.6e %18.12f %18s %12s %6d\n", n,
                    row.t, x, "", "", row.fp_iters);
    }
    out << buf;
    ++n;
  }
  if (record.failure) out << "# FAILED: " << *record.failure << '\n';
}

ConvergenceSummary run_convergence(const ProblemSpec& spec,
                                   const std::vector<int>& N_list,
                                   double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
  if (N_list.empty()) throw DomainError("empty N list");
  for (int N : N_list) {
    if (N < 2) throw DomainError("convergence runs need N >= 2");
  }
  {
    const auto reg = make_problem(spec.name, spec.q, spec.alpha);
    if (!reg.problem.exact) {
      throw DomainError("problem '" + spec.name + "' has no exact solution");
    }
  }

  std::vector<std::future<RunRecord>> jobs;
  for (int N : N_list) {
    ProblemSpec s = spec;
    s.N = N;
    jobs.push_back(std::async(std::launch::async, [s] { return run_solve(s); }));
  }

  ConvergenceSummary summary;
  summary.N_list = N_list;
  summary.expected_decay = 2.0 * delta * std::log(1.0 / spec.q);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    RunRecord record = jobs[j].get();
    const int N = N_list[j];
    if (record.failure) {
      summary.warnings.push_back("N=" + std::to_string(N) +
                                 ": " + *record.failure);
    }
    const int last = static_cast<int>(std::floor((1.0 - delta) * N));
    double max_err = 0.0;
    double rate = 0.0;
    for (std::size_t i = 0; i < record.rows.size(); ++i) {
      const int n = static_cast<int>(i) + 1;
      const double e = *record.rows[i].abs_err;
      if (n <= last) max_err = std::max(max_err, e);
      rate = std::max(rate, e / std::pow(spec.q, 2 * (N - n)));
    }
    if (last < 1) {
      summary.warnings.push_back("N=" + std::to_string(N) +
                                 ": no node satisfies n <= (1-delta) N");
    }
    summary.max_errors.push_back(max_err);
    summary.rate_constants.push_back(rate);
    summary.records.push_back(std::move(record));
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t j = 0; j < N_list.size(); ++j) {
    if (summary.max_errors[j] > 0.0) {
      xs.push_back(N_list[j]);
      ys.push_back(std::log(summary.max_errors[j]));
    }
  }
  if (xs.empty()) {
    summary.exact = true;
  } else if (xs.size() < 2) {
    summary.warnings.push_back("fewer than two nonzero errors: no fit");
  } else {
    if (xs.size() < N_list.size()) {
      summary.warnings.push_back("zero errors excluded from the fit");
    }
    const double k = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    summary.fitted_decay = -slope;
  }
  return summary;
}

void write_convergence(std::ostream& out, const ConvergenceSummary& summary) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%6s %16s %16s\n", "N", "max_err",
                "rate_const");
  out << buf;
  for (std::size_t j = 0; j < summary.N_list.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%6d %16.6e %16.6e\n", summary.N_list[j],
                  summary.max_errors[j], summary.rate_constants[j]);
    out << buf;
  }
  if (summary.exact) {
    out << "# exact: all errors vanish\n";
  } else if (summary.fitted_decay) {
    std::snprintf(buf, sizeof buf,
                  "# fitted decay %.6f per N, expected %.6f (ratio %.4f)\n",
                  *summary.fitted_decay, summary.expected_decay,
                  *summary.fitted_decay / summary.expected_decay);
    out << buf;
  }
  for (const auto& w : summary.warnings) out << "# warning: " << w << '\n';
}

double estimate_m2(const VecFn& exact, const QMesh& mesh,
                   const SeriesControl& ctl) {
  const double q = mesh.scale().q();
  const std::size_t d = exact(mesh.node(mesh.size())).size();
  double m2 = 0.0;
  for (int n = 1; n <= mesh.size(); ++n) {
    for (std::size_t i = 0; i < d; ++i) {
      const ScalarFn component = [&](double t) { return exact(t)[i]; };
      m2 = std::max(m2, std::abs(q_derivative_n(component, mesh.node(n), q, 2,
                                                ctl)));
    }
  }
  return m2;
}

BoundsReport run_bounds(const ProblemSpec& spec, std::optional<double> m2) {
  spec.validate();
  const RegisteredProblem reg =
      make_problem(spec.name, spec.q, spec.alpha, spec.config.series);
  if (!reg.problem.exact) {
    throw DomainError("problem '" + spec.name + "' has no exact solution");
  }
  const QScale scale(spec.q, spec.b);
  const QMesh mesh(scale, spec.N);

  BoundsReport report;
  report.record = run_solve(spec);
  if (m2) {
    report.m2 = *m2;
  } else {
    report.m2 = estimate_m2(reg.problem.exact, mesh, spec.config.series);
    report.m2_estimated = true;
  }
  if (reg.problem.lipschitz_L) {
    report.lipschitz_known = true;
    report.L1 = contraction_constant(*reg.problem.lipschitz_L,
                                     reg.problem.alpha, scale,
                                     spec.config.series);
    if (report.L1 >= 1.0) {
      throw DomainError("contraction constant L1 >= 1; bounds do not apply");
    }
  }

  SolveTrace trace{mesh, {reg.problem.x0}, {}, {}, {}, std::nullopt};
  for (const RunRow& row : report.record.rows) {
    trace.states.push_back(row.x_num);
    trace.fp_iterations.push_back(row.fp_iters);
  }
  const ErrorReport errors =
      error_report(trace, reg.problem, report.m2, report.L1);

  double fmax = 0.0;
  for (std::size_t i = 0; i < errors.abs_err.size(); ++i) {
    const double t = mesh.node(static_cast<int>(i) + 1);
    const double ratio = errors.bound[i] > 0.0
                             ? errors.abs_err[i] / errors.bound[i]
                             : (errors.abs_err[i] > 1e-13 ? INFINITY : 0.0);
    report.rows.push_back({t, errors.abs_err[i], errors.bound[i], ratio});
    if (ratio > 1.0) report.violated = true;

    const Vec f0 = reg.problem.f(t, Vec(reg.problem.dim(), 0.0));
    fmax = std::max(fmax, max_norm(f0));
    const double state = max_norm(trace.states[i + 1]);
    const double bound = stability_bound(reg.problem.x0, fmax, t,
                                         reg.problem.alpha, spec.q, report.L1,
                                         spec.config.series);
    report.max_state = std::max(report.max_state, state);
    report.stability = bound;
    if (state > bound * (1.0 + 1e-12)) report.violated = true;
  }
  if (report.record.failure) report.violated = true;
  return report;
}

void write_bounds(std::ostream& out, const BoundsReport& report) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "# m2=%.10g%s L1=%.10g%s\n", report.m2,
                report.m2_estimated ? " (estimated)" : "", report.L1,
                report.lipschitz_known ? "" : " (no Lipschitz constant; 0 used)");
  out << buf;
  std::snprintf(buf, sizeof buf, "%14s %14s %14s %10s\n", "t_n", "abs_err",
                "bound", "ratio");
  out << buf;
  for (const BoundRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%14.6e %14.6e %14.6e %10.4g\n", r.t,
                  r.abs_err, r.bound, r.ratio);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# stability: max|x^n|=%.10g bound(t_N)=%.10g\n",
                report.max_state, report.stability);
  out << buf;
  if (report.record.failure) out << "# FAILED: " << *report.record.failure << '\n';
  out << (report.violated ? "# VIOLATED\n" : "# ok\n");
}

}  // namespace qfde::harness
