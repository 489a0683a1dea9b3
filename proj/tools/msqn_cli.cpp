#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msqn/acceptance.hpp"
#include "msqn/error.hpp"
#include "msqn/experiments.hpp"

namespace {

using namespace msqn;

struct Output {
  std::string path;
  std::ofstream file;

  std::ostream& stream() {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw InputError("cannot open output file: " + path);
    return file;
  }
};

LineSearchPolicy parse_line_search(const std::string& name) {
  if (name == "unit") return LineSearchPolicy::unit();
  if (name == "dichotomy") return LineSearchPolicy::dichotomy();
  if (name == "armijo") return LineSearchPolicy::armijo();
  throw InputError("unknown line search: " + name);
}

void add_problem_flags(CLI::App* cmd, ProblemSpec& p) {
  cmd->add_option("--problem", p.kind, "quadratic, ridge, logistic or file")
      ->check(CLI::IsMember({"quadratic", "ridge", "logistic", "file"}));
  cmd->add_option("--dim", p.dim, "Dimension of synthetic problems");
  cmd->add_option("--samples", p.samples, "Samples of synthetic regression problems");
  cmd->add_option("--kappa", p.kappa, "Condition number of synthetic problems");
  cmd->add_option("--tau", p.tau, "L2 regularization of regression problems");
  cmd->add_option("--dataset", p.dataset, "Dataset file (implies --problem file)");
  cmd->add_option("--format", p.format, "Dataset format")->check(CLI::IsMember({"csv", "libsvm"}));
  cmd->add_option("--loss", p.loss, "Loss for dataset files")
      ->check(CLI::IsMember({"square", "logistic"}));
}

void add_kind_flags(CLI::App* cmd, std::string& method, UpdateKind& kind,
                    std::optional<double>& psd_floor) {
  cmd->add_option("--method", method, "sym1, sym2, broyden1, broyden2, lbfgs, bfgs, dfp or gd");
  cmd->add_option("--lambda-bar", kind.lambda_bar, "Relative regularization");
  cmd->add_option("--psd-floor", psd_floor, "Enable the PSD projection with this relative floor");
}

void finish_kind(const std::string& method, UpdateKind& kind,
                 const std::optional<double>& psd_floor) {
  kind.method = parse_method(method);
  kind.psd_floor = psd_floor;
}

void finish_problem(ProblemSpec& p) {
  if (!p.dataset.empty()) p.kind = "file";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multisecant quasi-Newton experiments"};
  app.require_subcommand(1);

  Output out;

  OptimizeConfig opt;
  std::string opt_method = "sym2";
  std::string line_search = "unit";
  std::string combine = "latest";
  std::optional<double> opt_floor;
  auto* optimize_cmd = app.add_subcommand("optimize", "Run an optimizer and write the trace CSV");
  add_problem_flags(optimize_cmd, opt.problem);
  add_kind_flags(optimize_cmd, opt_method, opt.kind, opt_floor);
  optimize_cmd->add_option("--memory", opt.memory, "Secant memory (0 = unbounded)");
  optimize_cmd->add_option("--seed", opt.seed, "Seed");
  optimize_cmd->add_option("--max-iters", opt.max_iters, "Iteration budget");
  optimize_cmd->add_option("--tol", opt.tol, "Relative gradient-norm tolerance");
  optimize_cmd->add_option("--batch-size", opt.batch_size, "SAGA batch (0 = full gradients)");
  optimize_cmd->add_option("--line-search", line_search, "unit, dichotomy or armijo");
  optimize_cmd->add_option("--combine", combine, "latest or average")
      ->check(CLI::IsMember({"latest", "average"}));
  optimize_cmd->add_option("--reference-scale", opt.reference_scale, "B_ref = s*I");
  optimize_cmd->add_flag("--average", opt.average_iterates, "Report the averaged iterate");
  optimize_cmd->add_flag("--timing", opt.timing, "Fill the wall_ms column");
  optimize_cmd->add_option("--out", out.path, "Output CSV (default stdout)");

  RecoverConfig rec;
  std::vector<std::string> rec_methods;
  std::vector<std::uint64_t> rec_seeds;
  std::vector<double> rec_eps;
  std::vector<double> rec_lambdas;
  auto* recover_cmd = app.add_subcommand("recover", "Hessian recovery sweep under noisy secants");
  recover_cmd->add_option("--dim", rec.dim, "Dimension");
  recover_cmd->add_option("--memory", rec.memory, "Number of secant pairs");
  recover_cmd->add_option("--kappa", rec.kappa, "Condition number of the quadratic");
  recover_cmd->add_option("--method", rec_methods, "Methods (repeatable; diag for the reference)");
  recover_cmd->add_option("--seed", rec_seeds, "Seeds (repeatable)");
  recover_cmd->add_option("--eps", rec_eps, "Noise levels (repeatable)");
  recover_cmd->add_option("--lambda-bar", rec_lambdas, "Symmetric-method lambda-bars (repeatable)");
  recover_cmd->add_option("--out", out.path, "Output CSV (default stdout)");

  SpectrumConfig spec;
  std::string spec_method = "sym2";
  std::string spec_line_search = "unit";
  std::optional<double> spec_floor;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Dump estimate eigenvalues per iteration");
  add_problem_flags(spectrum_cmd, spec.problem);
  add_kind_flags(spectrum_cmd, spec_method, spec.kind, spec_floor);
  spectrum_cmd->add_option("--memory", spec.memory, "Secant memory (0 = unbounded)");
  spectrum_cmd->add_option("--seed", spec.seed, "Seed");
  spectrum_cmd->add_option("--max-iters", spec.max_iters, "Iterations");
  spectrum_cmd->add_option("--line-search", spec_line_search, "unit, dichotomy or armijo");
  spectrum_cmd->add_option("--out", out.path, "Output CSV (default stdout)");

  std::vector<int> only;
  bool mutate = false;
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the acceptance suite");
  selftest_cmd->add_option("--only", only, "Criterion ids to run (repeatable)");
  selftest_cmd->add_flag("--mutate-z2", mutate, "Flip the sign of Z2 in the oracle check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::InputError);
  }

  try {
    if (*optimize_cmd) {
      finish_problem(opt.problem);
      finish_kind(opt_method, opt.kind, opt_floor);
      opt.line_search = parse_line_search(line_search);
      opt.combine = combine == "average" ? Combine::Average : Combine::Latest;
      const RunResult result = run_optimize(opt, out.stream());
      return static_cast<int>(exit_code(result.status));
    }
    if (*recover_cmd) {
      if (!rec_methods.empty()) rec.methods = rec_methods;
      if (!rec_seeds.empty()) rec.seeds = rec_seeds;
      if (!rec_eps.empty()) rec.eps = rec_eps;
      if (!rec_lambdas.empty()) rec.lambda_bars = rec_lambdas;
      for (const auto& m : rec.methods) {
        if (m != "diag") parse_method(m);
      }
      const auto rows = run_recover(rec);
      write_recover_csv(rec, rows, out.stream());
      return 0;
    }
    if (*spectrum_cmd) {
      finish_problem(spec.problem);
      finish_kind(spec_method, spec.kind, spec_floor);
      spec.line_search = parse_line_search(spec_line_search);
      write_spectrum_csv(spec, run_spectrum(spec), out.stream());
      return 0;
    }
    AcceptanceOptions options;
    options.only = std::set<int>(only.begin(), only.end());
    options.mutate_z2_sign = mutate;
    const auto results = run_acceptance(options);
    print_acceptance(results, std::cout);
    for (const auto& r : results) {
      if (!r.passed) return 1;
    }
    return 0;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
