// qfde: solve q-fractional initial value problems with the L1,q scheme.
//
//   qfde solve    --problem NAME --q Q --alpha A --b B --N N [...]
//   qfde converge --problem NAME --q Q --alpha A --N-list 6,8,10 --delta D
//   qfde bounds   --problem NAME --q Q --alpha A --N N
//
// Exit codes: 0 success, 1 solver non-convergence, 2 bound violation,
// 3 invalid arguments.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfde/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kNonConvergence = 1;
constexpr int kBoundViolation = 2;
constexpr int kInvalidArguments = 3;

struct CommonArgs {
  std::string problem;
  std::string q = "1/2";
  std::string alpha = "1/2";
  std::string b = "1";
  std::string first_weight = "series";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--problem", args.problem, "registry problem name")
      ->required();
  cmd->add_option("--q", args.q, "scale index, e.g. 2/3 or 0.25");
  cmd->add_option("--alpha", args.alpha, "fractional order in (0,1)");
  cmd->add_option("--b", args.b, "time horizon");
  cmd->add_option("--first-weight", args.first_weight,
                  "b_1 rule: series (t_0 = 0) or lattice")
      ->check(CLI::IsMember({"series", "lattice"}));
}

qfde::harness::ProblemSpec make_spec(const CommonArgs& args) {
  qfde::harness::ProblemSpec spec;
  spec.name = args.problem;
  spec.q = qfde::harness::parse_rational(args.q);
  spec.alpha = qfde::harness::parse_rational(args.alpha);
  spec.b = qfde::harness::parse_rational(args.b);
  spec.config.first_weight = args.first_weight == "lattice"
                                 ? qfde::FirstWeight::lattice
                                 : qfde::FirstWeight::series;
  return spec;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw qfde::DomainError("bad integer '" + item + "'");
    values.push_back(v);
  }
  return values;
}

// Writes through `emit` to PATH, or stdout when PATH is empty.
template <typename Emit>
void write_output(const std::string& path, Emit&& emit) {
  if (path.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qfde::DomainError("cannot open '" + path + "' for writing");
  emit(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L1,q solver for Caputo q-fractional initial value problems"};
  app.require_subcommand(1);

  CommonArgs solve_args;
  int solve_N = 10;
  std::string format = "table";
  std::string out_path;
  double fp_tol = 1e-13;
  int max_iters = 200;
  double perturb = 1e-8;
  auto* solve = app.add_subcommand("solve", "run one solve and print the table");
  add_common(solve, solve_args);
  solve->add_option("--N", solve_N, "number of mesh nodes");
  solve->add_option("--fp-tol", fp_tol, "fixed-point tolerance");
  solve->add_option("--max-iters", max_iters, "fixed-point iteration cap");
  solve->add_option("--perturb", perturb, "starting-iterate perturbation");
  solve->add_option("--format", format)->check(CLI::IsMember({"csv", "table"}));
  solve->add_option("--out", out_path, "output file (default stdout)");

  CommonArgs conv_args;
  std::string N_list = "6,8,10,12";
  double delta = 0.5;
  std::string conv_out;
  auto* converge = app.add_subcommand("converge", "error decay study over N");
  add_common(converge, conv_args);
  converge->add_option("--N-list", N_list, "comma separated N values");
  converge->add_option("--delta", delta, "node fraction parameter in (0,1)");
  converge->add_option("--out", conv_out, "output file (default stdout)");

  CommonArgs bound_args;
  int bound_N = 10;
  double m2 = -1.0;
  auto* bounds = app.add_subcommand("bounds", "check a-priori error bounds");
  add_common(bounds, bound_args);
  bounds->add_option("--N", bound_N, "number of mesh nodes");
  bounds->add_option("--m2", m2, "max |D_q^2 x| (estimated when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidArguments;
  }

  try {
    if (*solve) {
      auto spec = make_spec(solve_args);
      spec.N = solve_N;
      spec.config.fp_tol = fp_tol;
      spec.config.max_fp_iters = max_iters;
      spec.config.start_perturbation = perturb;
      const auto record = qfde::harness::run_solve(spec);
      write_output(out_path, [&](std::ostream& os) {
        if (format == "csv") {
          qfde::harness::write_csv(os, record);
        } else {
          qfde::harness::write_table(os, record);
        }
      });
      if (record.failure) {
        std::cerr << "qfde: " << *record.failure << '\n';
        return kNonConvergence;
      }
      return kOk;
    }
    if (*converge) {
      auto spec = make_spec(conv_args);
      const auto summary =
          qfde::harness::run_convergence(spec, parse_int_list(N_list), delta);
      write_output(conv_out, [&](std::ostream& os) {
        qfde::harness::write_convergence(os, summary);
      });
      for (const auto& r : summary.records) {
        if (r.failure) return kNonConvergence;
      }
      return kOk;
    }
    if (*bounds) {
      auto spec = make_spec(bound_args);
      spec.N = bound_N;
      const auto report = qfde::harness::run_bounds(
          spec, m2 >= 0.0 ? std::optional<double>(m2) : std::nullopt);
      qfde::harness::write_bounds(std::cout, report);
      if (report.record.failure) return kNonConvergence;
      return report.violated ? kBoundViolation : kOk;
    }
  } catch (const qfde::DomainError& e) {
    std::cerr << "qfde: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const qfde::NotSupportedError& e) {
    std::cerr << "qfde: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qfde: invalid argument: " << e.what() << '\n';
    return kInvalidArguments;
  } catch (const qfde::Error& e) {
    std::cerr << "qfde: " << e.what() << '\n';
    return kNonConvergence;
  }
  return kOk;
}
