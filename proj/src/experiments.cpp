#include "msqn/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"
#include "msqn/dataset_io.hpp"
#include "msqn/error.hpp"
#include "msqn/random.hpp"
#include "msqn/recovery.hpp"
#include "msqn/saga.hpp"

namespace msqn {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kDivergence = 1e10;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_flag(std::string& flags, const std::string& f) {
  if (f.empty()) return;
  if (!flags.empty()) flags += ';';
  flags += f;
}

const char* line_search_name(LineSearchKind k) {
  switch (k) {
    case LineSearchKind::Unit: return "unit";
    case LineSearchKind::Dichotomy: return "dichotomy";
    case LineSearchKind::Armijo: return "armijo";
  }
  return "unknown";
}

Json to_json(const ProblemSpec& p) {
  Json j;
  j["kind"] = p.kind;
  if (p.kind == "file") {
    j["dataset"] = p.dataset;
    j["format"] = p.format;
    j["loss"] = p.loss;
  } else {
    j["dim"] = p.dim;
    if (p.kind != "quadratic") j["samples"] = p.samples;
    j["kappa"] = p.kappa;
  }
  if (p.kind != "quadratic") j["tau"] = p.tau;
  return j;
}

Json to_json(const UpdateKind& k) {
  Json j;
  j["method"] = std::string(method_name(k.method));
  j["lambda_bar"] = k.lambda_bar;
  if (k.psd_floor) j["psd_floor"] = *k.psd_floor;
  return j;
}

Json to_json(const LineSearchPolicy& p) {
  Json j;
  j["kind"] = line_search_name(p.kind);
  if (p.kind == LineSearchKind::Dichotomy) {
    j["max_iters"] = p.max_iters;
    j["bracket_growth"] = p.bracket_growth;
    j["tol"] = p.tol;
  } else if (p.kind == LineSearchKind::Armijo) {
    j["c1"] = p.c1;
    j["backtrack"] = p.backtrack;
    j["max_iters"] = p.max_iters;
  }
  return j;
}

std::string header_line(const char* command, Json config) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  return "# " + j.dump() + "\n";
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::unique_ptr<Objective> make_objective(const ProblemSpec& spec, std::uint64_t seed) {
  if (spec.kind == "quadratic") {
    return std::make_unique<QuadraticObjective>(synthetic_quadratic(spec.dim, spec.kappa, seed));
  }
  if (spec.kind == "ridge") {
    return std::make_unique<RegressionObjective>(
        synthetic_regression(spec.samples, spec.dim, spec.kappa, Loss::Square, spec.tau, seed));
  }
  if (spec.kind == "logistic") {
    return std::make_unique<RegressionObjective>(
        synthetic_regression(spec.samples, spec.dim, spec.kappa, Loss::Logistic, spec.tau, seed));
  }
  if (spec.kind == "file") {
    if (spec.dataset.empty()) throw InputError("problem kind 'file' needs a dataset path");
    return std::make_unique<RegressionObjective>(
        ingest(spec.dataset, spec.format, parse_loss(spec.loss), spec.tau));
  }
  throw InvalidArgument("unknown problem kind '" + spec.kind + "'");
}

RunResult optimize(const Objective& obj, const Vector& x0, const OptimizeConfig& config) {
  if (x0.size() != obj.dim()) throw DimensionMismatch("optimize: starting point has wrong length");
  if (config.max_iters < 0) throw InvalidArgument("optimize: max_iters must be nonnegative");
  if (!(config.tol >= 0.0)) throw InvalidArgument("optimize: tol must be nonnegative");
  const bool stochastic = config.batch_size > 0;
  const auto* regression = dynamic_cast<const RegressionObjective*>(&obj);
  if (stochastic && regression == nullptr) {
    throw InvalidArgument("stochastic runs need a regression objective");
  }
  config.line_search.validate();

  UpdateKind kind = config.kind;
  kind.reference_scale = config.reference_scale.value_or(
      stochastic ? 3.0 * regression->max_sample_lipschitz() : obj.lipschitz());
  QnState state(kind, obj.dim(), config.memory);
  const LineSearchPolicy policy = stochastic ? LineSearchPolicy::unit() : config.line_search;
  const auto start = std::chrono::steady_clock::now();

  RunResult result;
  Vector x = x0;
  Vector avg = x0;
  Vector g_full = obj.gradient(x);
  double f_x = obj.value(x);
  const double g0 = g_full.norm();
  const double threshold = config.tol * g0;
  long long evals = stochastic ? 0 : 1;

  std::optional<SagaState> saga;
  if (stochastic) saga.emplace(*regression, x0, config.batch_size, derive_seed(config.seed, 1));

  result.records.push_back({0, f_x, g0, 0.0, evals, config.timing ? elapsed_ms(start) : 0.0, ""});
  if (g0 <= threshold || g0 == 0.0) {
    result.status = RunStatus::Converged;
    result.records.back().flag = "converged";
  }

  for (int k = 1; k <= config.max_iters && result.status != RunStatus::Converged; ++k) {
    std::string flags;
    Vector g;
    if (stochastic) {
      g = saga->next(*regression, x);
      evals += static_cast<long long>(std::min<Index>(config.batch_size, regression->samples()));
    } else {
      g = g_full;
    }
    state.observe(x, g);

    double h = 0.0;
    StepResult search;
    if (config.combine == Combine::Average && state.history().size() > 1) {
      const Index n = static_cast<Index>(state.history().size());
      const GeneralizedStep step =
          generalized_step(state, Vector::Constant(n, 1.0 / static_cast<double>(n)), policy, obj);
      append_flag(flags, step.fallback);
      search = step.search;
      h = step.h;
      x = step.x;
    } else {
      const Direction dir = state.direction(g);
      append_flag(flags, dir.fallback);
      std::optional<Vector> gx;
      if (policy.kind == LineSearchKind::Armijo) gx = g;
      search = line_search(policy, obj, x, dir.d, f_x, gx);
      h = search.h;
      x += h * dir.d;
    }
    if (!stochastic) evals += 1 + search.gradient_evals;
    if (search.no_decrease) {
      append_flag(flags, "no_decrease");
      if (state.history().size() <= 1) {
        append_flag(flags, "stalled");
        result.records.push_back({k, f_x, g_full.norm(), 0.0, evals,
                                  config.timing ? elapsed_ms(start) : 0.0, flags});
        break;
      }
      state = QnState(kind, obj.dim(), config.memory);
    }
    if (!flags.empty() && flags.find("no_decrease") == std::string::npos) ++result.fallbacks;

    f_x = search.f_new;
    if (!stochastic) g_full = obj.gradient(x);
    avg += (x - avg) / static_cast<double>(k + 1);

    const Vector& report = config.average_iterates ? avg : x;
    double f_report = f_x;
    double g_report = 0.0;
    if (config.average_iterates || stochastic) {
      f_report = obj.value(report);
      g_report = obj.gradient(report).norm();
      if (stochastic) f_x = obj.value(x);
    } else {
      g_report = g_full.norm();
    }

    if (!std::isfinite(f_report) || f_report > kDivergence || !x.allFinite()) {
      append_flag(flags, "diverged");
      result.status = RunStatus::Diverged;
      result.records.push_back({k, f_report, g_report, h, evals,
                                config.timing ? elapsed_ms(start) : 0.0, flags});
      break;
    }
    if (g_report <= threshold) {
      append_flag(flags, "converged");
      result.status = RunStatus::Converged;
    }
    result.records.push_back(
        {k, f_report, g_report, h, evals, config.timing ? elapsed_ms(start) : 0.0, flags});
  }
  result.x = x;
  result.x_average = avg;
  return result;
}

ExitCode exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return ExitCode::Complete;
    case RunStatus::Budget: return ExitCode::Budget;
    case RunStatus::Diverged: return ExitCode::Diverged;
  }
  return ExitCode::Budget;
}

std::string config_header(const OptimizeConfig& c) {
  Json j;
  j["problem"] = to_json(c.problem);
  j["update"] = to_json(c.kind);
  j["memory"] = c.memory;
  j["seed"] = c.seed;
  j["max_iters"] = c.max_iters;
  j["tol"] = c.tol;
  j["batch_size"] = c.batch_size;
  j["line_search"] = to_json(c.line_search);
  j["average_iterates"] = c.average_iterates;
  j["averaging_window"] = "cumulative from iteration 0";
  j["combine"] = c.combine == Combine::Average ? "average" : "latest";
  if (c.reference_scale) j["reference_scale"] = *c.reference_scale;
  j["timing"] = c.timing;
  return header_line("optimize", std::move(j));
}

RunResult run_optimize(const OptimizeConfig& config, std::ostream& out) {
  const auto obj = make_objective(config.problem, config.seed);
  Rng rng(derive_seed(config.seed, 0));
  const Vector x0 = gaussian_vector(rng, obj->dim());
  RunResult result = optimize(*obj, x0, config);
  out << config_header(config);
  out << "iter,f,grad_norm,step,cum_grad_evals,wall_ms,flag\n";
  for (const auto& r : result.records) {
    out << r.iter << ',' << num(r.f) << ',' << num(r.grad_norm) << ',' << num(r.step) << ','
        << r.cum_grad_evals << ',' << num(r.wall_ms) << ',' << r.flag << '\n';
  }
  return result;
}

SecantData gd_secants(Index dim, Index memory, double kappa, std::uint64_t seed) {
  if (memory < 1 || memory > dim) throw InvalidArgument("recover: need 1 <= memory <= dim");
  const QuadraticObjective q = synthetic_quadratic(dim, kappa, seed);
  Rng rng(derive_seed(seed, 7));
  const double l = q.lipschitz();
  Matrix x(dim, memory + 1);
  Matrix g(dim, memory + 1);
  x.col(0) = gaussian_vector(rng, dim);
  g.col(0) = q.gradient(x.col(0));
  for (Index k = 1; k <= memory; ++k) {
    x.col(k) = x.col(k - 1) - g.col(k - 1) / l;
    g.col(k) = q.gradient(x.col(k));
  }
  SecantData out;
  out.dx = x.rightCols(memory) - x.leftCols(memory);
  out.dg = g.rightCols(memory) - g.leftCols(memory);
  out.lipschitz = l;
  out.q = q.q();
  return out;
}

std::vector<RecoverRow> run_recover(const RecoverConfig& config) {
  struct Cell {
    double eps;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double eps : config.eps) {
    for (std::uint64_t seed : config.seeds) cells.push_back({eps, seed});
  }
  std::vector<std::vector<RecoverRow>> per_cell(cells.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell cell = cells[c];
    auto& rows = per_cell[c];
    auto record = [&](const std::string& method, double lb, auto&& fit) {
      RecoverRow row{cell.eps, method, lb, cell.seed, 0.0, ""};
      try {
        fit(row);
      } catch (const std::exception& e) {
        row.error = std::nan("");
        row.flag = std::string("error: ") + e.what();
      }
      rows.push_back(std::move(row));
    };
    SecantData data;
    Matrix dg_noisy;
    try {
      data = gd_secants(config.dim, config.memory, config.kappa, cell.seed);
      dg_noisy = corrupt_worst_case(data.dg, cell.eps);
    } catch (const std::exception& e) {
      rows.push_back({cell.eps, "all", 0.0, cell.seed, std::nan(""), std::string("error: ") + e.what()});
      continue;
    }
    const double s = data.lipschitz;
    for (const auto& method : config.methods) {
      if (method == "diag") {
        record(method, 0.0, [&](RecoverRow& r) {
          r.error = recovery_error(InverseHessianEstimate::reference(config.dim, s), data.dg, data.dx);
        });
        continue;
      }
      const Method m = parse_method(method);
      const bool symmetric = m == Method::SymMultisecantI || m == Method::SymMultisecantII;
      const std::vector<double> lbs = symmetric ? config.lambda_bars : std::vector<double>{0.0};
      for (double lb : lbs) {
        record(method, lb, [&](RecoverRow& r) {
          UpdateKind kind;
          kind.method = m;
          kind.lambda_bar = lb;
          kind.reference_scale = s;
          const InverseHessianEstimate h = build_estimate(kind, data.dx, dg_noisy);
          r.error = recovery_error(h, data.dg, data.dx);
          r.flag = h.fallback() ? h.fallback_reason() : h.note();
        });
      }
    }
  }

  std::vector<RecoverRow> out;
  for (auto& rows : per_cell) {
    for (auto& r : rows) out.push_back(std::move(r));
  }
  return out;
}

std::string config_header(const RecoverConfig& c) {
  Json j;
  j["dim"] = c.dim;
  j["memory"] = c.memory;
  j["kappa"] = c.kappa;
  j["eps"] = c.eps;
  j["seeds"] = c.seeds;
  j["lambda_bars"] = c.lambda_bars;
  j["methods"] = c.methods;
  j["trajectory"] = "gradient descent, step 1/L, Gaussian start";
  return header_line("recover", std::move(j));
}

void write_recover_csv(const RecoverConfig& config, const std::vector<RecoverRow>& rows,
                       std::ostream& out) {
  out << config_header(config);
  out << "eps,method,lambda_bar,seed,error,flag\n";
  for (const auto& r : rows) {
    out << num(r.eps) << ',' << r.method << ',' << num(r.lambda_bar) << ',' << r.seed << ','
        << num(r.error) << ',' << r.flag << '\n';
  }
}

std::vector<SpectrumRow> run_spectrum(const SpectrumConfig& config) {
  const auto obj = make_objective(config.problem, config.seed);
  if (obj->dim() > 1000) throw InvalidArgument("spectrum is limited to d <= 1000");
  config.line_search.validate();
  Rng rng(derive_seed(config.seed, 0));
  Vector x = gaussian_vector(rng, obj->dim());

  UpdateKind kind = config.kind;
  kind.reference_scale = obj->lipschitz();
  const double spike = 1.0 / kind.reference_scale;
  QnState state(kind, obj->dim(), config.memory);

  std::vector<SpectrumRow> rows;
  double f = obj->value(x);
  for (int k = 0; k <= config.max_iters; ++k) {
    const Vector g = obj->gradient(x);
    state.observe(x, g);
    for (const auto& ev : estimate_spectrum(state.estimate())) {
      if (std::abs(ev.real() - spike) <= 1e-9 * spike && std::abs(ev.imag()) <= 1e-9 * spike) {
        continue;
      }
      rows.push_back({k, ev.real(), std::abs(ev.imag())});
    }
    if (g.norm() == 0.0 || k == config.max_iters) break;
    const Direction dir = state.direction(g);
    const StepResult step = line_search(config.line_search, *obj, x, dir.d, f, g);
    if (step.no_decrease) break;
    x += step.h * dir.d;
    f = step.f_new;
    if (!x.allFinite()) break;
  }
  return rows;
}

std::string config_header(const SpectrumConfig& c) {
  Json j;
  j["problem"] = to_json(c.problem);
  j["update"] = to_json(c.kind);
  j["memory"] = c.memory;
  j["seed"] = c.seed;
  j["max_iters"] = c.max_iters;
  j["line_search"] = to_json(c.line_search);
  j["spike_excluded"] = "1/L within 1e-9 relative";
  return header_line("spectrum", std::move(j));
}

void write_spectrum_csv(const SpectrumConfig& config, const std::vector<SpectrumRow>& rows,
                        std::ostream& out) {
  out << config_header(config);
  out << "iter,real,imag_abs\n";
  for (const auto& r : rows) out << r.iter << ',' << num(r.real) << ',' << num(r.imag_abs) << '\n';
}

}  // namespace msqn
