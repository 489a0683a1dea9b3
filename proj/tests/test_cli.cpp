#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "msqn/dataset_io.hpp"
#include "msqn/error.hpp"
#include "msqn/experiments.hpp"
#include "msqn/recovery.hpp"
#include "msqn/updates.hpp"
#include "test_util.hpp"

using namespace msqn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "msqn_tests";
  fs::create_directories(dir);
  return dir / name;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MSQN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("libsvm parsing densifies 1-based indices") {
  std::istringstream in("1 1:2.0 3:-1.0\n-1 2:4\n");
  const RawDataset raw = parse_libsvm(in);
  REQUIRE(raw.features.rows() == 2);
  REQUIRE(raw.features.cols() == 3);
  CHECK(raw.features(0, 0) == 2.0);
  CHECK(raw.features(0, 1) == 0.0);
  CHECK(raw.features(0, 2) == -1.0);
  CHECK(raw.features(1, 1) == 4.0);
  CHECK(raw.labels(0) == 1.0);
}

TEST_CASE("malformed input reports the line") {
  std::istringstream bad_svm("1 1:2.0\n1 x:3\n");
  try {
    parse_libsvm(bad_svm);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream bad_csv("1,2,0\n1,oops,1\n");
  CHECK_THROWS_AS(parse_csv(bad_csv), InputError);
  std::istringstream ragged("1,2,0\n1,1\n");
  CHECK_THROWS_AS(parse_csv(ragged), InputError);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_csv(empty), InputError);
  std::istringstream empty_svm("\n");
  CHECK_THROWS_AS(parse_libsvm(empty_svm), InputError);
  CHECK_THROWS_AS(read_dataset("/nonexistent/file.csv", "csv"), InputError);
}

TEST_CASE("csv ingestion standardizes and remaps labels") {
  std::istringstream in("a,b,y\n0.5,1.5,0\n-0.5,-1.5,1\n");
  const RawDataset raw = parse_csv(in);
  REQUIRE(raw.features.rows() == 2);
  const RegressionObjective obj = ingest(raw, Loss::Logistic);
  CHECK(obj.data()(0, 0) == doctest::Approx(1.0));
  CHECK(obj.data()(1, 0) == doctest::Approx(-1.0));
  CHECK(obj.data()(0, 1) == doctest::Approx(1.0));
  CHECK(obj.labels()(0) == -1.0);
  CHECK(obj.labels()(1) == 1.0);
}

TEST_CASE("constant columns become zero") {
  RowMatrix f(3, 2);
  f << 1, 5, 2, 5, 3, 5;
  standardize(f);
  CHECK(f.col(1).norm() == 0.0);
  CHECK(f.col(0).mean() == doctest::Approx(0.0));
  CHECK((f.col(0).array().square().mean()) == doctest::Approx(1.0));
}

TEST_CASE("emit then ingest round trip") {
  Rng rng(3);
  const RowMatrix features = gaussian_matrix(rng, 20, 4);
  Vector labels = gaussian_vector(rng, 20);
  const fs::path p = scratch("roundtrip.csv");
  {
    std::ofstream out(p);
    emit_csv(features, labels, out);
  }
  const RegressionObjective a = ingest(p.string(), "csv", Loss::Square);
  const RegressionObjective b = ingest(RawDataset{features, labels}, Loss::Square);
  CHECK((a.data() - b.data()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((a.labels() - labels).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("optimize output is byte-identical for a fixed config") {
  OptimizeConfig c;
  c.problem.kind = "ridge";
  c.problem.dim = 10;
  c.problem.samples = 300;
  c.problem.kappa = 100.0;
  c.kind.method = Method::SymMultisecantI;
  c.kind.lambda_bar = 1e-2;
  c.memory = 5;
  c.batch_size = 16;
  c.max_iters = 30;
  c.seed = 4;
  std::ostringstream a, b;
  run_optimize(c, a);
  run_optimize(c, b);
  CHECK(a.str() == b.str());

  std::istringstream lines(a.str());
  std::string header, columns;
  std::getline(lines, header);
  std::getline(lines, columns);
  REQUIRE(header.rfind("# ", 0) == 0);
  const auto j = nlohmann::json::parse(header.substr(2));
  CHECK(j["schema"] == kSchemaVersion);
  CHECK(j["command"] == "optimize");
  CHECK(j["config"]["seed"] == 4);
  CHECK(columns == "iter,f,grad_norm,step,cum_grad_evals,wall_ms,flag");
}

TEST_CASE("gradient evaluation accounting") {
  SUBCASE("stochastic") {
    const RegressionObjective r = synthetic_regression(200, 8, 10.0, Loss::Square, 0.0, 1);
    OptimizeConfig c;
    c.kind.method = Method::GradientDescent;
    c.batch_size = 16;
    c.max_iters = 12;
    c.tol = 0.0;
    const RunResult res = optimize(r, Vector::Zero(8), c);
    for (const auto& rec : res.records) CHECK(rec.cum_grad_evals == 16LL * rec.iter);
  }
  SUBCASE("deterministic with line search") {
    const QuadraticObjective q = synthetic_quadratic(8, 10.0, 1);
    OptimizeConfig c;
    c.kind.method = Method::LBFGS;
    c.memory = 3;
    c.max_iters = 10;
    c.tol = 0.0;
    c.line_search = LineSearchPolicy::armijo();
    const RunResult res = optimize(q, Vector::Ones(8), c);
    CHECK(res.records[0].cum_grad_evals == 1);
    for (std::size_t k = 1; k < res.records.size(); ++k) {
      CHECK(res.records[k].cum_grad_evals == res.records[k - 1].cum_grad_evals + 1);
    }
  }
}

TEST_CASE("gradient descent with step 1/L decreases f monotonically") {
  const QuadraticObjective q = synthetic_quadratic(15, 50.0, 2);
  OptimizeConfig c;
  c.kind.method = Method::GradientDescent;
  c.max_iters = 40;
  c.tol = 0.0;
  const RunResult res = optimize(q, Vector::Ones(15), c);
  for (std::size_t k = 1; k < res.records.size(); ++k) {
    CHECK(res.records[k].f < res.records[k - 1].f);
  }
}

TEST_CASE("Type-I on a d=20 quadratic converges within 21 iterations") {
  OptimizeConfig c;
  c.problem.kind = "quadratic";
  c.problem.dim = 20;
  c.problem.kappa = 10.0;
  c.kind.method = Method::SymMultisecantI;
  c.max_iters = 21;
  c.tol = 1e-6;
  std::ostringstream out;
  const RunResult res = run_optimize(c, out);
  CHECK(res.status == RunStatus::Converged);
  CHECK(res.records.back().flag.find("converged") != std::string::npos);
  CHECK(exit_code(res.status) == ExitCode::Complete);
}

TEST_CASE("averaged iterates and divergence") {
  const RegressionObjective r = synthetic_regression(300, 10, 100.0, Loss::Square, 0.0, 3);
  OptimizeConfig c;
  c.kind.method = Method::SymMultisecantI;
  c.kind.lambda_bar = 1e-2;
  c.memory = 5;
  c.batch_size = 32;
  c.max_iters = 20;
  c.average_iterates = true;
  c.combine = Combine::Average;
  const RunResult res = optimize(r, Vector::Zero(10), c);
  CHECK(res.records.back().f == doctest::Approx(r.value(res.x_average)));

  const QuadraticObjective q = synthetic_quadratic(5, 10.0, 0);
  OptimizeConfig bad;
  bad.kind.method = Method::GradientDescent;
  bad.reference_scale = 1e-3;
  bad.max_iters = 50;
  const RunResult div = optimize(q, Vector::Ones(5), bad);
  CHECK(div.status == RunStatus::Diverged);
  CHECK(exit_code(div.status) == ExitCode::Diverged);
  CHECK(exit_code(RunStatus::Budget) == ExitCode::Budget);
}

TEST_CASE("recovery sweep") {
  SUBCASE("exact interpolation at eps 0") {
    const SecantData data = gd_secants(30, 5, 10.0, 1);
    UpdateKind k;
    k.method = Method::SymMultisecantII;
    k.reference_scale = data.lipschitz;
    CHECK(recovery_error(build_estimate(k, data.dx, data.dg), data.dg, data.dx) <= 1e-8);
  }
  SUBCASE("eps 1 reduces the fitted-gradient methods to the reference") {
    RecoverConfig cfg;
    cfg.dim = 20;
    cfg.memory = 6;
    cfg.eps = {1.0};
    cfg.seeds = {0};
    const auto rows = run_recover(cfg);
    double diag = 0.0;
    for (const auto& row : rows) {
      if (row.method == "diag") diag = row.error;
    }
    for (const auto& row : rows) {
      CHECK(std::isfinite(row.error));
      if (row.method != "sym1") CHECK(row.error == doctest::Approx(diag).epsilon(1e-10));
    }
  }
  SUBCASE("csv is deterministic and carries the config") {
    RecoverConfig cfg;
    cfg.dim = 20;
    cfg.memory = 6;
    cfg.eps = {0.0, 0.3};
    cfg.seeds = {0, 1};
    std::ostringstream a, b;
    write_recover_csv(cfg, run_recover(cfg), a);
    write_recover_csv(cfg, run_recover(cfg), b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("\"command\":\"recover\"") != std::string::npos);
    CHECK(a.str().find("eps,method,lambda_bar,seed,error,flag") != std::string::npos);
  }
}

TEST_CASE("spectrum dump") {
  SpectrumConfig cfg;
  cfg.problem.dim = 12;
  cfg.problem.kappa = 10.0;
  cfg.max_iters = 4;
  const auto rows = run_spectrum(cfg);
  for (const auto& row : rows) {
    CHECK(row.iter >= 1);
    CHECK(row.imag_abs == 0.0);
  }
  CHECK_FALSE(rows.empty());
  cfg.kind.method = Method::MultisecantBroydenII;
  std::ostringstream out;
  write_spectrum_csv(cfg, run_spectrum(cfg), out);
  CHECK(out.str().find("iter,real,imag_abs") != std::string::npos);
}

TEST_CASE("command line exit codes") {
  const fs::path out = scratch("cli_out.csv");
  CHECK(run_cli("optimize --method sym1 --dim 10 --kappa 10 --max-iters 30 --tol 1e-6 --out " +
                out.string()) == 0);
  CHECK(slurp(out).find("msqn-csv/1") != std::string::npos);
  CHECK(run_cli("optimize --method gd --dim 10 --kappa 100 --max-iters 3 --tol 1e-12") == 2);
  CHECK(run_cli("optimize --method gd --dim 5 --reference-scale 0.001 --max-iters 50") == 3);
  CHECK(run_cli("optimize --dataset /nonexistent.csv") == 4);
  CHECK(run_cli("optimize --method newton") == 4);
  CHECK(run_cli("optimize --line-search golden") == 4);
  CHECK(run_cli("optimize --bogus-flag") == 4);

  const fs::path data = scratch("cli_data.svm");
  {
    std::ofstream f(data);
    f << "1 1:0.5 2:1.0\n-1 1:-0.3 3:2.0\n1 2:0.7 3:-1.0\n-1 1:1.1\n";
  }
  CHECK(run_cli("optimize --dataset " + data.string() +
                " --format libsvm --loss logistic --tau 0.1 --method lbfgs --max-iters 200 "
                "--line-search armijo --tol 1e-6") == 0);
  CHECK(run_cli("recover --dim 20 --memory 5 --seed 0 --eps 0.1 --out " + out.string()) == 0);
  CHECK(run_cli("spectrum --dim 8 --max-iters 3 --out " + out.string()) == 0);
  CHECK(run_cli("selftest --only 1") == 0);
  CHECK(run_cli("selftest --only 1 --mutate-z2") == 1);
}
