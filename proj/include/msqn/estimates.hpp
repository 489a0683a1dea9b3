#pragma once

#include <memory>
#include <optional>
#include <string>

#include "msqn/reference_operator.hpp"
#include "msqn/rsp.hpp"
#include "msqn/types.hpp"

namespace msqn {

/// Linear map v ↦ H·v approximating the inverse Hessian, whatever the update
/// family that produced it. Cheap to copy (shared immutable state).
class InverseHessianEstimate {
 public:
  class Operator {
   public:
    virtual ~Operator() = default;
    virtual Matrix apply(const Matrix& v) const = 0;
  };

  InverseHessianEstimate(std::shared_ptr<const Operator> op, Index dim, bool symmetric);

  /// (1/s)·I, i.e. H_ref = B_ref⁻¹ with B_ref = s·I.
  static InverseHessianEstimate reference(Index dim, double scale);
  static InverseHessianEstimate dense(Matrix h, bool symmetric);
  static InverseHessianEstimate rsp_forward(RspFactors factors);
  static InverseHessianEstimate rsp_inverse(RspFactors factors);

  Index dim() const { return dim_; }
  Vector apply(const Vector& v) const;
  Matrix apply(const Matrix& v) const;
  Matrix materialize() const;

  /// True for families whose estimate is symmetric by construction.
  bool symmetric_family() const { return symmetric_; }

  /// Set when a numerical failure replaced the update by the reference step.
  bool fallback() const { return !fallback_reason_.empty(); }
  const std::string& fallback_reason() const { return fallback_reason_; }
  InverseHessianEstimate with_fallback(std::string reason) const;

  /// Non-fatal note, e.g. a truncated pseudo-inverse.
  const std::string& note() const { return note_; }
  InverseHessianEstimate with_note(std::string note) const;

 private:
  std::shared_ptr<const Operator> op_;
  Index dim_;
  bool symmetric_;
  std::string fallback_reason_;
  std::string note_;
};

/// Relative tolerance used by the curvature filter: sᵀy ≤ tol·‖s‖‖y‖ is skipped.
inline constexpr double kCurvatureTolerance = 1e-12;

bool passes_curvature_filter(const Vector& s, const Vector& y);

/// Symmetric multisecant estimates from an RSP fit with λ = λ̄·σ_max(A)².
/// Type-I fits B (A = ΔX, D = ΔG, Zref = s·I) and returns B⁻¹; Type-II fits
/// H (A = ΔG, D = ΔX, Zref = I/s). A failed fit yields the flagged reference.
/// psd_floor, relative to the Zref scale, enables the PSD projection.
InverseHessianEstimate sym_type1_estimate(const Matrix& dx, const Matrix& dg, double lambda_bar,
                                          double scale,
                                          std::optional<double> psd_floor = std::nullopt);
InverseHessianEstimate sym_type2_estimate(const Matrix& dx, const Matrix& dg, double lambda_bar,
                                          double scale,
                                          std::optional<double> psd_floor = std::nullopt);

/// B⁻¹ = B0⁻¹ + (ΔX − B0⁻¹ΔG)(ΔXᵀB0⁻¹ΔG)⁻¹ΔXᵀB0⁻¹ with B0 = s·I.
InverseHessianEstimate broyden1_estimate(const Matrix& dx, const Matrix& dg, double scale);

/// H = ΔX·ΔG† + H_ref(I − ΔG·ΔG†) with H_ref = I/s; rank-deficient ΔG uses
/// the truncated pseudo-inverse and is noted.
InverseHessianEstimate broyden2_estimate(const Matrix& dx, const Matrix& dg, double scale);

/// Two-loop recursion over the columns, oldest first, with H0 = I/s.
InverseHessianEstimate lbfgs_estimate(const Matrix& dx, const Matrix& dg, double scale);

/// Single-secant inverse updates applied in place to a dense H.
void bfgs_update(Matrix& h, const Vector& s, const Vector& y);
void dfp_update(Matrix& h, const Vector& s, const Vector& y);

/// Chains of single-secant updates over the columns starting at H = I/s.
Matrix bfgs_chain(const Matrix& dx, const Matrix& dg, double scale);
Matrix dfp_chain(const Matrix& dx, const Matrix& dg, double scale);

/// Type-II semi-implicit preconditioned update
///   H = Y T⁻¹ Yᵀ + (I − P1)ᵀ H_ref (I − P1),  Y = W⁻¹ΔG,  T = ΔGᵀY,  P1 = ΔG T⁻¹ Yᵀ,
/// satisfying W·H·ΔG = ΔG.
InverseHessianEstimate semi_implicit_type2(const Matrix& dg, const ReferenceOperator& w,
                                           const ReferenceOperator& href);

/// Type-I counterpart, returned as B⁻¹:
///   B⁻¹ = ΔX T⁻¹ ΔXᵀ + B_ref⁻¹ − B_ref⁻¹U(UᵀB_ref⁻¹U)⁻¹UᵀB_ref⁻¹,  U = WΔX,  T = ΔXᵀU,
/// so that W⁻¹·B·ΔX = ΔX.
InverseHessianEstimate semi_implicit_type1(const Matrix& dx, const ReferenceOperator& w,
                                           const ReferenceOperator& bref);

}  // namespace msqn
