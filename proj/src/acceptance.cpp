#include "msqn/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "msqn/estimates.hpp"
#include "msqn/experiments.hpp"
#include "msqn/objectives.hpp"
#include "msqn/random.hpp"
#include "msqn/rsp.hpp"
#include "msqn/saga.hpp"
#include "msqn/updates.hpp"

namespace msqn {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(b.norm(), std::numeric_limits<double>::min());
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Matrix random_spd(Rng& rng, Index d, double cond) {
  const Matrix u = random_orthogonal(rng, d);
  Vector ev(d);
  for (Index i = 0; i < d; ++i) {
    const double t = d == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(d - 1);
    ev(i) = std::pow(cond, -t);
  }
  Matrix m = u * ev.asDiagonal() * u.transpose();
  return 0.5 * (m + m.transpose());
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Vector affine_weights(Rng& rng, Index n) {
  Vector v = gaussian_vector(rng, n);
  v.array() -= v.mean();
  v.array() += 1.0 / static_cast<double>(n);
  return v;
}

Vector start_point(Index d, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  return gaussian_vector(rng, d);
}

OptimizeConfig unit_config(Method method, int max_iters, double tol) {
  OptimizeConfig c;
  c.kind.method = method;
  c.kind.lambda_bar = 0.0;
  c.memory = 0;
  c.max_iters = max_iters;
  c.tol = tol;
  c.line_search = LineSearchPolicy::unit();
  return c;
}

CriterionResult oracle_equivalence(const AcceptanceOptions& options) {
  CriterionResult r{1, "oracle equivalence", false, "", 0.0};
  const double lambdas[] = {0.0, 1e-6, 1e-2, 1.0};
  double worst = 0.0;
  int failures = 0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 200; ++i) {
    Rng rng(derive_seed(1000, static_cast<std::uint64_t>(i)));
    const Index d = 4 + i % 7;
    const Index m = 1 + (i / 7) % 4;
    RspProblem p;
    p.a = gaussian_matrix(rng, d, m);
    p.d = gaussian_matrix(rng, d, m);
    p.lambda = lambdas[i % 4];
    p.zref = (i / 4) % 2 == 0 ? ReferenceOperator::scaled_identity(uniform(rng, 0.5, 2.0))
                              : ReferenceOperator::dense(random_spd(rng, d, 10.0));
    RspFactors f = factorize(p);
    if (options.mutate_z2_sign) {
      f = RspFactors(f.v1(), f.sigma(), f.z1(), -f.z2(), f.zref(), f.lambda());
    }
    const double err = rel_diff(f.materialize(), brute_force_oracle(p));
    worst = std::max(worst, err);
    if (!(err <= 1e-8)) ++failures;
  }
  r.seconds = seconds_since(t0);
  r.passed = failures == 0 && r.seconds <= 30.0;
  r.detail = "200 instances, max rel err " + sci(worst) + ", " + std::to_string(failures) +
             " over 1e-8";
  return r;
}

CriterionResult inverse_formula() {
  CriterionResult r{2, "inverse formula", false, "", 0.0};
  double worst_round = 0.0;
  double worst_dense = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(derive_seed(2000, static_cast<std::uint64_t>(i)));
    const Index d = 5 + i % 36;
    const Index m = 1 + i % std::min<Index>(d - 1, 8);
    const Matrix q = random_spd(rng, d, 10.0);
    const Matrix a = gaussian_matrix(rng, d, m);
    const Matrix dmat = q * a;
    const ReferenceOperator zref = i % 4 == 3 ? ReferenceOperator::dense(random_spd(rng, d, 5.0))
                                              : ReferenceOperator::scaled_identity(0.5);
    const RspFactors f = factorize_relative(a, dmat, i % 2 == 0 ? 0.0 : 1e-2, zref);
    const Matrix v = gaussian_matrix(rng, d, 3);
    worst_round = std::max(worst_round, rel_diff(f.apply(f.apply_inverse(v)), v));
    worst_round = std::max(worst_round, rel_diff(f.apply_inverse(f.apply(v)), v));
  }
  for (int i = 0; i < 10; ++i) {
    Rng rng(derive_seed(2100, static_cast<std::uint64_t>(i)));
    const Index d = 8;
    const Matrix a = gaussian_matrix(rng, d, 1 + i % 5);
    const Matrix dmat = random_spd(rng, d, 10.0) * a;
    const ReferenceOperator zref = i % 2 == 0 ? ReferenceOperator::scaled_identity(2.0)
                                              : ReferenceOperator::dense(random_spd(rng, d, 5.0));
    const RspFactors f = factorize_relative(a, dmat, i % 3 == 0 ? 0.0 : 1e-3, zref);
    worst_dense = std::max(worst_dense, rel_diff(f.materialize_inverse(), f.materialize().inverse()));
  }
  r.passed = worst_round <= 1e-8 && worst_dense <= 1e-8;
  r.detail = "round trip max " + sci(worst_round) + " (100 instances), dense d=8 max " +
             sci(worst_dense);
  return r;
}

double time_products(const RspFactors& f, const Vector& v) {
  constexpr int kReps = 200;
  double best = std::numeric_limits<double>::infinity();
  double sink = 0.0;
  for (int trial = 0; trial < 7; ++trial) {
    const auto t0 = Clock::now();
    for (int k = 0; k < kReps; ++k) {
      sink += f.apply(v)(0);
      sink += f.apply_inverse(v)(0);
    }
    best = std::min(best, seconds_since(t0) / kReps);
  }
  if (!std::isfinite(sink)) return std::numeric_limits<double>::infinity();
  return best;
}

CriterionResult complexity_contract() {
  CriterionResult r{3, "linear-in-d products", false, "", 0.0};
  double times[2];
  const Index dims[2] = {1000, 2000};
  for (int j = 0; j < 2; ++j) {
    Rng rng(derive_seed(3000, static_cast<std::uint64_t>(j)));
    const Index d = dims[j];
    const Matrix a = gaussian_matrix(rng, d, 20);
    const Matrix dmat = 2.0 * a + 0.1 * gaussian_matrix(rng, d, 20);
    const RspFactors f =
        factorize_relative(a, dmat, 1e-2, ReferenceOperator::scaled_identity(1.0));
    times[j] = time_products(f, gaussian_vector(rng, d));
  }
  const double ratio = times[1] / times[0];
  r.passed = ratio <= 2.5;
  r.detail = "m=20, apply+apply_inverse " + sci(times[0] * 1e6) + " us at d=1000, " +
             sci(times[1] * 1e6) + " us at d=2000, ratio " + sci(ratio);
  return r;
}

CriterionResult finite_termination() {
  CriterionResult r{4, "finite termination", false, "", 0.0};
  constexpr double kKappa = 10.0;
  std::ostringstream detail;
  detail << "kappa=" << kKappa << ";";
  bool all = true;
  const auto t0 = Clock::now();
  for (Method method : {Method::SymMultisecantI, Method::SymMultisecantII}) {
    for (Index d : {Index{10}, Index{20}}) {
      int passed = 0;
      double worst = 0.0;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const QuadraticObjective q = synthetic_quadratic(d, kKappa, seed);
        const RunResult res =
            optimize(q, start_point(d, seed), unit_config(method, static_cast<int>(d) + 1, 1e-10));
        double best = std::numeric_limits<double>::infinity();
        for (const auto& rec : res.records) {
          best = std::min(best, rec.grad_norm / res.records.front().grad_norm);
        }
        worst = std::max(worst, best);
        if (res.status == RunStatus::Converged) ++passed;
      }
      all = all && passed == 5;
      detail << ' ' << method_name(method) << " d=" << d << ' ' << passed << "/5 (worst "
             << sci(worst) << ")";
    }
  }
  r.seconds = seconds_since(t0);
  r.passed = all && r.seconds <= 10.0;
  r.detail = detail.str();
  return r;
}

CriterionResult minimal_polynomial() {
  CriterionResult r{5, "minimal-polynomial termination", false, "", 0.0};
  constexpr Index d = 50;
  Vector ev(d);
  for (Index i = 0; i < d; ++i) ev(i) = i % 3 == 0 ? 0.1 : (i % 3 == 1 ? 0.5 : 1.0);
  std::ostringstream detail;
  bool all = true;
  for (Method method : {Method::SymMultisecantI, Method::SymMultisecantII}) {
    int passed = 0;
    int latest = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const QuadraticObjective q = quadratic_from_spectrum(ev, seed);
      const RunResult res = optimize(q, start_point(d, seed), unit_config(method, 5, 1e-8));
      if (res.status == RunStatus::Converged) {
        ++passed;
        latest = std::max(latest, res.records.back().iter);
      }
    }
    all = all && passed == 5;
    detail << method_name(method) << ' ' << passed << "/5 (latest iter " << latest << ") ";
  }
  r.passed = all;
  r.detail = detail.str() + "3 distinct eigenvalues, d=50";
  return r;
}

double log_slope(const std::vector<RunRecord>& records, int upto) {
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  int n = 0;
  for (const auto& rec : records) {
    if (rec.iter > upto) break;
    const double k = rec.iter;
    const double y = std::log(rec.grad_norm);
    sk += k;
    sy += y;
    skk += k * k;
    sky += k * y;
    ++n;
  }
  return (n * sky - sk * sy) / (n * skk - sk * sk);
}

CriterionResult rate_envelope() {
  CriterionResult r{6, "rate envelope", false, "", 0.0};
  constexpr Index d = 30;
  constexpr int kIters = 15;
  std::ostringstream detail;
  bool all = true;
  for (double kappa : {10.0, 100.0}) {
    const double root = std::sqrt(1.0 / kappa);
    const double log_rho = std::log((1.0 - root) / (1.0 + root));
    for (Method method : {Method::MultisecantBroydenI, Method::MultisecantBroydenII}) {
      int passed = 0;
      double worst = -std::numeric_limits<double>::infinity();
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const QuadraticObjective q = synthetic_quadratic(d, kappa, seed);
        const RunResult res = optimize(q, start_point(d, seed), unit_config(method, kIters, 0.0));
        const double slope = res.records.size() == kIters + 1
                                 ? log_slope(res.records, kIters)
                                 : std::numeric_limits<double>::infinity();
        worst = std::max(worst, slope / log_rho);
        if (slope <= 0.9 * log_rho) ++passed;
      }
      all = all && passed == 5;
      detail << method_name(method) << " kappa=" << kappa << ' ' << passed << "/5 (log rho "
             << sci(log_rho) << ") ";
    }
  }
  r.passed = all;
  r.detail = detail.str() + "d=30, first 15 iterations, H_ref=I/L";
  return r;
}

CriterionResult v_invariance() {
  CriterionResult r{7, "v-invariance", false, "", 0.0};
  constexpr Index d = 12;
  constexpr Index points = 6;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const QuadraticObjective q = synthetic_quadratic(d, 10.0, seed);
    Rng rng(derive_seed(7000, seed));
    for (Method method : {Method::SymMultisecantI, Method::SymMultisecantII,
                          Method::MultisecantBroydenI, Method::MultisecantBroydenII}) {
      UpdateKind kind;
      kind.method = method;
      kind.reference_scale = q.lipschitz();
      QnState state(kind, d, 0);
      for (Index k = 0; k < points; ++k) {
        const Vector x = gaussian_vector(rng, d);
        state.observe(x, q.gradient(x));
      }
      const Vector first =
          generalized_step(state, affine_weights(rng, points), LineSearchPolicy::unit(), q).x;
      for (int j = 1; j < 5; ++j) {
        const Vector other =
            generalized_step(state, affine_weights(rng, points), LineSearchPolicy::unit(), q).x;
        worst = std::max(worst, (other - first).norm() / std::max(1.0, first.norm()));
      }
    }
  }
  r.passed = worst <= 1e-10;
  r.detail = "5 quadratics x 4 methods x 5 weight vectors, max rel spread " + sci(worst);
  return r;
}

CriterionResult bias_bound_check() {
  CriterionResult r{8, "regularization bias bound", false, "", 0.0};
  const double lambdas[] = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  int failures = 0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(derive_seed(8000, static_cast<std::uint64_t>(i)));
    const Index d = 5 + i % 10;
    const Index m = 1 + (i / 10) % 5;
    const Matrix a = gaussian_matrix(rng, d, m);
    const Matrix dmat = random_spd(rng, d, 10.0) * a + 0.3 * gaussian_matrix(rng, d, m);
    const ReferenceOperator zref = ReferenceOperator::scaled_identity(uniform(rng, 0.5, 2.0));
    const RspFactors zero = factorize({a, dmat, 0.0, zref});
    const RspFactors reg = factorize({a, dmat, lambdas[i % 6], zref});
    const BiasBound b = bias_bound(reg, zero);
    worst_ratio = std::max(worst_ratio, b.measured / b.bound);
    if (!(b.measured <= b.bound)) ++failures;
  }
  r.passed = failures == 0;
  r.detail = "100 instances, max measured/bound " + sci(worst_ratio) + ", " +
             std::to_string(failures) + " violations";
  return r;
}

CriterionResult stability_scaling() {
  CriterionResult r{9, "stability scaling", false, "", 0.0};
  const double deltas[] = {1e-4, 1e-3, 1e-2};
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    Rng rng(derive_seed(9000, static_cast<std::uint64_t>(i)));
    const Index d = 8;
    const Index m = 3;
    const Matrix a = gaussian_matrix(rng, d, m);
    const Matrix dmat = gaussian_matrix(rng, d, m);
    Matrix ea = gaussian_matrix(rng, d, m);
    Matrix ed = gaussian_matrix(rng, d, m);
    ea /= ea.norm();
    ed /= ed.norm();
    const ReferenceOperator zref = ReferenceOperator::scaled_identity(1.0);
    for (double lambda : {1e-3, 1e-2}) {
      const Matrix z = factorize({a, dmat, lambda, zref}).materialize();
      double k_fit = 0.0;
      for (double delta : deltas) {
        const Matrix zt =
            factorize({a + 0.5 * delta * ea, dmat + 0.5 * delta * ed, lambda, zref}).materialize();
        const double err = (zt - z).norm();
        if (delta == deltas[0]) {
          k_fit = err * lambda / delta;
          continue;
        }
        const double ratio = err / (k_fit * delta / lambda);
        worst = std::max(worst, ratio);
        if (!(ratio <= 3.0)) ++failures;
      }
    }
  }
  r.passed = failures == 0;
  r.detail = "10 instances x lambda {1e-3,1e-2}, max err/(K delta/lambda) " + sci(worst) +
             " (limit 3)";
  return r;
}

CriterionResult recovery_ordering() {
  CriterionResult r{10, "recovery ordering", false, "", 0.0};
  RecoverConfig cfg;
  cfg.eps = {0.3};
  cfg.methods = {"bfgs", "sym1", "sym2"};
  const auto rows = run_recover(cfg);
  auto error_of = [&](const std::string& method, double lb, std::uint64_t seed) {
    for (const auto& row : rows) {
      if (row.method == method && row.seed == seed && (method == "bfgs" || row.lambda_bar == lb)) {
        return row.error;
      }
    }
    return std::nan("");
  };
  int sym1_reg = 0, sym2_reg = 0, bfgs_worse = 0;
  for (std::uint64_t seed : cfg.seeds) {
    if (error_of("sym1", 1e-10, seed) <= error_of("sym1", 1e-20, seed)) ++sym1_reg;
    if (error_of("sym2", 1e-10, seed) <= error_of("sym2", 1e-20, seed)) ++sym2_reg;
    if (error_of("bfgs", 0.0, seed) >= error_of("sym2", 1e-10, seed)) ++bfgs_worse;
  }
  r.passed = sym1_reg >= 4 && sym2_reg >= 4 && bfgs_worse >= 4;
  r.detail = "eps=0.3: regularized <= unregularized sym1 " + std::to_string(sym1_reg) +
             "/5, sym2 " + std::to_string(sym2_reg) + "/5; bfgs >= regularized sym2 " +
             std::to_string(bfgs_worse) + "/5";
  return r;
}

CriterionResult stochastic_comparison() {
  CriterionResult r{11, "stochastic comparison", false, "", 0.0};
  constexpr Index kSamples = 2000;
  constexpr Index kDim = 50;
  constexpr int kIters = 400;
  int wins = 0;
  std::ostringstream detail;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RegressionObjective obj =
        synthetic_regression(kSamples, kDim, 1e3, Loss::Square, 0.0, seed);
    const Vector x0 = start_point(kDim, seed);
    OptimizeConfig cfg;
    cfg.seed = seed;
    cfg.batch_size = 64;
    cfg.memory = 25;
    cfg.max_iters = kIters;
    cfg.tol = 0.0;
    cfg.average_iterates = true;
    cfg.kind.lambda_bar = 1e-2;
    cfg.kind.method = Method::SymMultisecantI;
    const RunResult qn = optimize(obj, x0, cfg);
    cfg.kind.method = Method::GradientDescent;
    const RunResult saga = optimize(obj, x0, cfg);
    const bool same_budget =
        qn.records.back().cum_grad_evals == saga.records.back().cum_grad_evals;
    const double f_qn = qn.records.back().f;
    const double f_saga = saga.records.back().f;
    if (same_budget && qn.status != RunStatus::Diverged && f_qn <= f_saga) ++wins;
    detail << sci(f_qn) << " vs " << sci(f_saga) << (seed < 4 ? ", " : "");
  }
  r.seconds = seconds_since(t0);
  r.passed = wins >= 3 && r.seconds <= 120.0;
  r.detail = "averaged f sym1 vs saga: " + detail.str() + " (" + std::to_string(wins) +
             "/5 wins)";
  return r;
}

CriterionResult secant_symmetry() {
  CriterionResult r{12, "secant and symmetry invariants", false, "", 0.0};
  double worst_secant = 0.0;
  double worst_sym = 0.0;
  double min_asym = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    Rng rng(derive_seed(12000, static_cast<std::uint64_t>(i)));
    const Index d = 15;
    const Index m = 1 + i % 6;
    const Matrix q = random_spd(rng, d, 10.0);
    const Matrix dx = gaussian_matrix(rng, d, m);
    const Matrix dg = q * dx;
    const Matrix dx_free = gaussian_matrix(rng, d, m);
    const Matrix dg_free = gaussian_matrix(rng, d, m);
    for (Method method : {Method::SymMultisecantI, Method::SymMultisecantII,
                          Method::MultisecantBroydenI, Method::MultisecantBroydenII}) {
      UpdateKind kind;
      kind.method = method;
      kind.reference_scale = 1.0;
      const InverseHessianEstimate h = build_estimate(kind, dx, dg);
      worst_secant = std::max(worst_secant, rel_diff(h.apply(dg), dx));
    }
    for (Method method : {Method::SymMultisecantI, Method::SymMultisecantII}) {
      for (double lb : {0.0, 1e-3}) {
        UpdateKind kind;
        kind.method = method;
        kind.lambda_bar = lb;
        kind.reference_scale = 1.0;
        if (i % 2 == 1) kind.psd_floor = 1e-3;
        for (const Matrix* data : {&dg, &dg_free}) {
          const Matrix& x = data == &dg ? dx : dx_free;
          const InverseHessianEstimate h = build_estimate(kind, x, *data);
          if (h.fallback()) continue;
          const Matrix dense = h.materialize();
          worst_sym = std::max(worst_sym, (dense - dense.transpose()).norm() / dense.norm());
        }
      }
    }
    UpdateKind broyden;
    broyden.method = Method::MultisecantBroydenII;
    const Matrix hb = build_estimate(broyden, dx_free, dg_free).materialize();
    min_asym = std::min(min_asym, (hb - hb.transpose()).norm());
  }
  r.passed = worst_secant <= 1e-8 && worst_sym <= 1e-10 && min_asym > 1e-6;
  r.detail = "secant residual max " + sci(worst_secant) + ", symmetric-family asymmetry max " +
             sci(worst_sym) + ", Broyden-II witness min " + sci(min_asym);
  return r;
}

CriterionResult psd_projection() {
  CriterionResult r{13, "PSD projection", false, "", 0.0};
  double worst = std::numeric_limits<double>::infinity();
  int indefinite = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(derive_seed(13000, static_cast<std::uint64_t>(i)));
    const Index d = 5 + i % 26;
    const Index m = 1 + i % std::min<Index>(d - 1, 6);
    const Matrix a = gaussian_matrix(rng, d, m);
    const Matrix dmat = gaussian_matrix(rng, d, m);
    const ReferenceOperator zref = i % 3 == 2
                                       ? ReferenceOperator::dense(random_spd(rng, d, 10.0))
                                       : ReferenceOperator::scaled_identity(uniform(rng, 0.5, 2.0));
    const double floor = i % 5 == 0 ? 0.0 : 0.5 * zref.min_eigenvalue();
    const RspFactors f = factorize_relative(a, dmat, i % 2 == 0 ? 0.0 : 1e-2, zref);
    if (min_eigenvalue(f.materialize()) < floor) ++indefinite;
    const double lo = min_eigenvalue(psd_project(f, floor).materialize());
    worst = std::min(worst, lo - floor);
  }
  r.passed = worst >= -1e-10;
  r.detail = "50 instances (" + std::to_string(indefinite) +
             " below the floor before projection), min(lambda_min - floor) " + sci(worst);
  return r;
}

CriterionResult preconditioned_constraint() {
  CriterionResult r{14, "preconditioned constraint", false, "", 0.0};
  double worst2 = 0.0;
  double worst1 = 0.0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(derive_seed(14000, static_cast<std::uint64_t>(i)));
    const Index d = 4 + i % 9;
    const Index m = 1 + i % std::min<Index>(d - 1, 5);
    const Matrix wm = random_spd(rng, d, 100.0);
    const ReferenceOperator w = ReferenceOperator::dense(wm);
    const ReferenceOperator ref = i % 2 == 0 ? ReferenceOperator::scaled_identity(1.5)
                                             : ReferenceOperator::dense(random_spd(rng, d, 10.0));
    const Matrix dg = gaussian_matrix(rng, d, m);
    const InverseHessianEstimate h2 = semi_implicit_type2(dg, w, ref);
    worst2 = std::max(worst2, rel_diff(wm * h2.apply(dg), dg));
    const Matrix dx = gaussian_matrix(rng, d, m);
    const Matrix b = semi_implicit_type1(dx, w, ref).materialize().inverse();
    worst1 = std::max(worst1, rel_diff(w.apply_inverse(Matrix(b * dx)), dx));
  }
  r.passed = worst2 <= 1e-10 && worst1 <= 1e-10;
  r.detail = "50 instances, Type-II max " + sci(worst2) + ", Type-I max " + sci(worst1);
  return r;
}

double finite_difference_error(const Objective& obj, const Vector& x) {
  const Vector g = obj.gradient(x);
  Vector fd(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    Vector xp = x;
    Vector xm = x;
    xp(i) += h;
    xm(i) -= h;
    fd(i) = (obj.value(xp) - obj.value(xm)) / (2.0 * h);
  }
  return (g - fd).norm() / std::max(1.0, g.norm());
}

void for_each_subset(Index n, Index k, const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

CriterionResult gradient_correctness() {
  CriterionResult r{15, "gradient correctness", false, "", 0.0};
  double worst_fd = 0.0;
  double worst_saga = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(derive_seed(15000, seed));
    const QuadraticObjective q = synthetic_quadratic(8, 50.0, seed);
    worst_fd = std::max(worst_fd, finite_difference_error(q, gaussian_vector(rng, 8)));
    for (Loss loss : {Loss::Square, Loss::Logistic}) {
      const RegressionObjective obj = synthetic_regression(50, 6, 20.0, loss, 0.1, seed);
      worst_fd = std::max(worst_fd, finite_difference_error(obj, gaussian_vector(rng, 6)));

      const RegressionObjective small = synthetic_regression(10, 4, 5.0, loss, 0.05, seed);
      SagaState saga(small, gaussian_vector(rng, 4), 3, seed);
      saga.next(small, gaussian_vector(rng, 4));
      saga.next(small, gaussian_vector(rng, 4));
      const Vector x = gaussian_vector(rng, 4);
      Vector sum = Vector::Zero(4);
      int count = 0;
      for_each_subset(10, 3, [&](const std::vector<Index>& batch) {
        sum += saga.estimate(small, x, batch);
        ++count;
      });
      const Vector g = small.gradient(x);
      worst_saga = std::max(worst_saga, (sum / count - g).norm() / std::max(1.0, g.norm()));
    }
  }
  r.passed = worst_fd <= 1e-5 && worst_saga <= 1e-10;
  r.detail = "finite-difference max " + sci(worst_fd) + ", SAGA exhaustive mean max " +
             sci(worst_saga) + " (N=10, batch 3)";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const std::function<CriterionResult()> criteria[kCriterionCount] = {
      [&] { return oracle_equivalence(options); },
      inverse_formula,
      complexity_contract,
      finite_termination,
      minimal_polynomial,
      rate_envelope,
      v_invariance,
      bias_bound_check,
      stability_scaling,
      recovery_ordering,
      stochastic_comparison,
      secant_symmetry,
      psd_projection,
      preconditioned_constraint,
      gradient_correctness,
  };
  std::vector<CriterionResult> results;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!options.only.empty() && options.only.count(id) == 0) continue;
    const auto t0 = Clock::now();
    CriterionResult res;
    try {
      res = criteria[id - 1]();
    } catch (const std::exception& e) {
      static const char* const kNames[kCriterionCount] = {
          "oracle equivalence", "inverse formula", "linear-in-d products", "finite termination",
          "minimal-polynomial termination", "rate envelope", "v-invariance",
          "regularization bias bound", "stability scaling", "recovery ordering",
          "stochastic comparison", "secant and symmetry invariants", "PSD projection",
          "preconditioned constraint", "gradient correctness"};
      res.id = id;
      res.name = kNames[id - 1];
      res.passed = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = seconds_since(t0);
    results.push_back(std::move(res));
  }
  return results;
}

void print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out) {
  for (const auto& r : results) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
    out << (r.passed ? "[PASS] " : "[FAIL] ") << 'C' << r.id << ' ' << r.name << " (" << secs
        << " s): " << r.detail << '\n';
  }
}

}  // namespace msqn
