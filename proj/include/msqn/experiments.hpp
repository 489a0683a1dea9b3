#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msqn/kernels.hpp"
#include "msqn/linesearch.hpp"
#include "msqn/objectives.hpp"
#include "msqn/updates.hpp"

namespace msqn {

inline constexpr const char* kSchemaVersion = "msqn-csv/1";

enum class ExitCode : int { Complete = 0, Budget = 2, Diverged = 3, InputError = 4 };

/// Synthetic instance or a user file.
struct ProblemSpec {
  /// quadratic, ridge, logistic, or file (needs dataset).
  std::string kind = "quadratic";
  Index dim = 20;
  Index samples = 2000;
  double kappa = 100.0;
  double tau = 0.0;
  std::string dataset;
  std::string format = "csv";
  /// Loss for file datasets: square or logistic.
  std::string loss = "square";
};

std::unique_ptr<Objective> make_objective(const ProblemSpec& spec, std::uint64_t seed);

enum class Combine { Latest, Average };

struct OptimizeConfig {
  ProblemSpec problem;
  UpdateKind kind;
  /// 0 means unbounded.
  std::size_t memory = 0;
  std::uint64_t seed = 0;
  int max_iters = 100;
  /// Stop once ‖∇f‖ ≤ tol·‖∇f(x₀)‖.
  double tol = 1e-8;
  /// 0 selects full gradients; otherwise SAGA with this batch and unit steps.
  Index batch_size = 0;
  LineSearchPolicy line_search;
  bool average_iterates = false;
  Combine combine = Combine::Latest;
  /// Overrides the default reference scale (L, or 3·L_max for SAGA runs).
  std::optional<double> reference_scale;
  /// Wall-clock column; off keeps the output byte-reproducible.
  bool timing = false;
};

struct RunRecord {
  int iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  long long cum_grad_evals = 0;
  double wall_ms = 0.0;
  std::string flag;
};

enum class RunStatus { Converged, Budget, Diverged };

struct RunResult {
  std::vector<RunRecord> records;
  RunStatus status = RunStatus::Budget;
  Vector x;
  Vector x_average;
  int fallbacks = 0;
};

/// Optimizer loop on an explicit objective and starting point.
RunResult optimize(const Objective& obj, const Vector& x0, const OptimizeConfig& config);

/// Builds the instance from the config, runs it and writes the CSV.
RunResult run_optimize(const OptimizeConfig& config, std::ostream& out);
ExitCode exit_code(RunStatus status);

struct RecoverConfig {
  Index dim = 60;
  Index memory = 20;
  double kappa = 100.0;
  std::vector<double> eps = {0.0, 0.01, 0.03, 0.1, 0.3, 1.0};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  /// The unregularized and regularized settings used for the symmetric methods.
  std::vector<double> lambda_bars = {1e-20, 1e-10};
  std::vector<std::string> methods = {"diag", "lbfgs", "bfgs", "broyden1", "broyden2", "sym1", "sym2"};
};

struct RecoverRow {
  double eps = 0.0;
  std::string method;
  double lambda_bar = 0.0;
  std::uint64_t seed = 0;
  double error = 0.0;
  std::string flag;
};

/// Secant data from a gradient-descent trajectory (step 1/L, random start)
/// on a synthetic quadratic.
struct SecantData {
  Matrix dx;
  Matrix dg;
  double lipschitz = 1.0;
  Matrix q;
};
SecantData gd_secants(Index dim, Index memory, double kappa, std::uint64_t seed);

std::vector<RecoverRow> run_recover(const RecoverConfig& config);
void write_recover_csv(const RecoverConfig& config, const std::vector<RecoverRow>& rows,
                       std::ostream& out);

struct SpectrumConfig {
  ProblemSpec problem;
  UpdateKind kind;
  std::size_t memory = 0;
  std::uint64_t seed = 0;
  int max_iters = 20;
  LineSearchPolicy line_search;
};

struct SpectrumRow {
  int iter = 0;
  double real = 0.0;
  double imag_abs = 0.0;
};

/// Eigenvalues of the estimate after each iteration, with the reference spike
/// (values within 1e-9 relative of 1/s) removed.
std::vector<SpectrumRow> run_spectrum(const SpectrumConfig& config);
void write_spectrum_csv(const SpectrumConfig& config, const std::vector<SpectrumRow>& rows,
                        std::ostream& out);

/// '#'-prefixed JSON line carrying the schema version and configuration.
std::string config_header(const OptimizeConfig& config);
std::string config_header(const RecoverConfig& config);
std::string config_header(const SpectrumConfig& config);

}  // namespace msqn
