#include "msqn/updates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "msqn/error.hpp"

namespace msqn {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 8> kNames{{
    {Method::SymMultisecantI, "sym1"},
    {Method::SymMultisecantII, "sym2"},
    {Method::MultisecantBroydenI, "broyden1"},
    {Method::MultisecantBroydenII, "broyden2"},
    {Method::LBFGS, "lbfgs"},
    {Method::BFGS, "bfgs"},
    {Method::DFP, "dfp"},
    {Method::GradientDescent, "gd"},
}};

bool is_dense(Method m) { return m == Method::BFGS || m == Method::DFP; }

bool is_multisecant(Method m) {
  return m == Method::SymMultisecantI || m == Method::SymMultisecantII ||
         m == Method::MultisecantBroydenI || m == Method::MultisecantBroydenII;
}

std::size_t window(const UpdateKind& kind, Index dim, std::size_t memory) {
  if (kind.method == Method::GradientDescent) return 1;
  if (is_dense(kind.method)) return 1;
  std::size_t cap = memory == 0 ? SecantHistory::kUnbounded : memory;
  if (is_multisecant(kind.method)) cap = std::min(cap, static_cast<std::size_t>(dim));
  return cap;
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kNames) {
    if (method == m) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [method, n] : kNames) {
    if (n == name) return method;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

void UpdateKind::validate() const {
  if (!(lambda_bar >= 0.0) || !std::isfinite(lambda_bar)) {
    throw InvalidArgument("lambda_bar must be finite and nonnegative");
  }
  if (!(reference_scale > 0.0) || !std::isfinite(reference_scale)) {
    throw InvalidArgument("reference scale must be positive and finite");
  }
  if (psd_floor && !(*psd_floor >= 0.0 && *psd_floor < 1.0)) {
    throw InvalidArgument("relative PSD floor must lie in [0, 1)");
  }
}

InverseHessianEstimate build_estimate(const UpdateKind& kind, const Matrix& dx, const Matrix& dg) {
  kind.validate();
  const double s = kind.reference_scale;
  const Index d = dx.rows();
  if (dx.cols() == 0 && kind.method != Method::BFGS && kind.method != Method::DFP) {
    return InverseHessianEstimate::reference(d, s);
  }
  switch (kind.method) {
    case Method::SymMultisecantI:
      return sym_type1_estimate(dx, dg, kind.lambda_bar, s, kind.psd_floor);
    case Method::SymMultisecantII:
      return sym_type2_estimate(dx, dg, kind.lambda_bar, s, kind.psd_floor);
    case Method::MultisecantBroydenI:
      return broyden1_estimate(dx, dg, s);
    case Method::MultisecantBroydenII:
      return broyden2_estimate(dx, dg, s);
    case Method::LBFGS:
      return lbfgs_estimate(dx, dg, s);
    case Method::BFGS:
      return InverseHessianEstimate::dense(bfgs_chain(dx, dg, s), true);
    case Method::DFP:
      return InverseHessianEstimate::dense(dfp_chain(dx, dg, s), true);
    case Method::GradientDescent:
      return InverseHessianEstimate::reference(d, s);
  }
  throw InvalidArgument("unknown method");
}

QnState::QnState(UpdateKind kind, Index dim, std::size_t memory)
    : kind_(kind), history_(dim, window(kind, dim, memory)) {
  kind_.validate();
  if (is_dense(kind_.method)) {
    if (static_cast<std::size_t>(dim) > kDenseLimit) {
      throw InvalidArgument("dense BFGS/DFP carry is limited to d <= 2000");
    }
    dense_ = Matrix::Identity(dim, dim) / kind_.reference_scale;
  }
}

void QnState::observe(const Vector& x, const Vector& g) {
  if (is_dense(kind_.method) && !history_.empty()) {
    if (x.size() != dim() || g.size() != dim()) {
      throw DimensionMismatch("observe: point or gradient has wrong length");
    }
    const Vector s = x - history_.latest_x();
    const Vector y = g - history_.latest_g();
    if (kind_.method == Method::BFGS) {
      bfgs_update(dense_, s, y);
    } else {
      dfp_update(dense_, s, y);
    }
  }
  history_.push(x, g);
}

InverseHessianEstimate QnState::estimate() const {
  if (is_dense(kind_.method)) return InverseHessianEstimate::dense(dense_, true);
  const SecantDeltas deltas = history_.deltas();
  return build_estimate(kind_, deltas.dx, deltas.dg);
}

Direction QnState::direction(const Vector& g) const {
  if (g.size() != dim()) throw DimensionMismatch("direction: gradient has wrong length");
  const InverseHessianEstimate h = estimate();
  return {-h.apply(g), h.fallback_reason()};
}

GeneralizedStep generalized_step(const QnState& state, const Vector& v,
                                 const LineSearchPolicy& policy, const Objective& obj) {
  const auto [xv, w] = state.history().combine(v);
  const Direction dir = state.direction(w);
  GeneralizedStep out;
  const double f0 = obj.value(xv);
  std::optional<Vector> g0;
  if (policy.kind == LineSearchKind::Armijo) g0 = obj.gradient(xv);
  out.search = line_search(policy, obj, xv, dir.d, f0, g0);
  out.h = out.search.h;
  out.x = xv + out.h * dir.d;
  out.fallback = dir.fallback;
  return out;
}

std::vector<std::complex<double>> estimate_spectrum(const InverseHessianEstimate& h) {
  if (h.dim() > 1000) throw InvalidArgument("spectrum diagnostic is limited to d <= 1000");
  const Matrix m = h.materialize();
  std::vector<std::complex<double>> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  if (h.symmetric_family()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    for (Index i = 0; i < m.rows(); ++i) out.emplace_back(eig.eigenvalues()(i), 0.0);
  } else {
    Eigen::EigenSolver<Matrix> eig(m, false);
    for (Index i = 0; i < m.rows(); ++i) out.push_back(eig.eigenvalues()(i));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return out;
}

Vector spectrum_diagnostic(const QnState& state) {
  const auto spectrum = estimate_spectrum(state.estimate());
  Vector out(static_cast<Index>(spectrum.size()));
  for (std::size_t i = 0; i < spectrum.size(); ++i) out(static_cast<Index>(i)) = spectrum[i].real();
  return out;
}

}  // namespace msqn
