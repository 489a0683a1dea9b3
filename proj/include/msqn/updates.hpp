#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msqn/estimates.hpp"
#include "msqn/linesearch.hpp"
#include "msqn/objectives.hpp"
#include "msqn/secant_history.hpp"

namespace msqn {

enum class Method {
  SymMultisecantI,
  SymMultisecantII,
  MultisecantBroydenI,
  MultisecantBroydenII,
  LBFGS,
  BFGS,
  DFP,
  GradientDescent,
};

/// Short names used on the command line: sym1, sym2, broyden1, broyden2,
/// lbfgs, bfgs, dfp, gd.
std::string_view method_name(Method m);
Method parse_method(std::string_view name);

struct UpdateKind {
  Method method = Method::SymMultisecantII;
  /// Relative regularization; λ = λ̄·σ_max(A)².
  double lambda_bar = 0.0;
  /// Optional PSD floor on the RSP estimate, relative to the reference scale.
  std::optional<double> psd_floor;
  /// B_ref = s·I, H_ref = (1/s)·I.
  double reference_scale = 1.0;

  void validate() const;
};

/// Default floor when the PSD projection is switched on without a value.
inline constexpr double kDefaultPsdFloor = 1e-8;

struct Direction {
  Vector d;
  /// Reason the reference step replaced the update; empty when none.
  std::string fallback;
};

/// Estimate from a block of secant pairs for any method. BFGS and DFP chain
/// single-secant updates over the columns, starting at H_ref.
InverseHessianEstimate build_estimate(const UpdateKind& kind, const Matrix& dx, const Matrix& dg);

/// Optimizer-side state: secant window plus the dense BFGS/DFP carry.
class QnState {
 public:
  /// Memory 0 means unbounded. Multisecant windows are capped at d columns.
  static constexpr std::size_t kDenseLimit = 2000;

  QnState(UpdateKind kind, Index dim, std::size_t memory);

  void observe(const Vector& x, const Vector& g);

  const UpdateKind& kind() const { return kind_; }
  const SecantHistory& history() const { return history_; }
  Index dim() const { return history_.dimension(); }

  InverseHessianEstimate estimate() const;
  /// −H·g (−B⁻¹g for Type-I families).
  Direction direction(const Vector& g) const;

 private:
  UpdateKind kind_;
  SecantHistory history_;
  Matrix dense_;
};

struct GeneralizedStep {
  Vector x;
  double h = 0.0;
  StepResult search;
  std::string fallback;
};

/// w = G·v, d = H·w, x₊ = X·v − h·d with h from the policy along −d.
GeneralizedStep generalized_step(const QnState& state, const Vector& v,
                                 const LineSearchPolicy& policy, const Objective& obj);

/// Eigenvalues of the materialized estimate, sorted by real part. Limited to
/// d ≤ 1000.
std::vector<std::complex<double>> estimate_spectrum(const InverseHessianEstimate& h);

/// Real parts of estimate_spectrum(state.estimate()), ascending.
Vector spectrum_diagnostic(const QnState& state);

}  // namespace msqn
