#pragma once

#include <Eigen/Eigenvalues>

#include "msqn/reference_operator.hpp"
#include "msqn/types.hpp"

namespace msqn {

/// min over symmetric Z of ‖ZA − D‖²_F + (λ/2)‖Z − Zref‖²_F.
struct RspProblem {
  Matrix a;
  Matrix d;
  double lambda = 0.0;
  ReferenceOperator zref = ReferenceOperator::scaled_identity(1.0);
};

/// Factorized symmetric solution
///   Z = V1·Z1·V1ᵀ + V1·Z2 + Z2ᵀ·V1ᵀ + (I − P)·Zref·(I − P),  P = V1·V1ᵀ.
///
/// Products with Z and Z⁻¹ cost O(r·d) plus one Zref product; no d×d matrix
/// is formed except by materialize(). The inverse uses the block form
///   Z⁻¹ = E·core⁻¹·Eᵀ + W,  W = V2(V2ᵀ Zref V2)⁻¹V2ᵀ,
///   E = V1 − W·Z2ᵀ,  core = Z1 − Z2·W·Z2ᵀ,
/// where W is evaluated from Zref⁻¹ and V1 alone.
class RspFactors {
 public:
  static constexpr double kMaxCoreCondition = 1e14;

  RspFactors(Matrix v1, Vector sigma, Matrix z1, Matrix z2, ReferenceOperator zref, double lambda);

  Index dim() const { return v1_.rows(); }
  Index rank() const { return v1_.cols(); }
  const Matrix& v1() const { return v1_; }
  const Vector& sigma() const { return sigma_; }
  const Matrix& z1() const { return z1_; }
  const Matrix& z2() const { return z2_; }
  const ReferenceOperator& zref() const { return zref_; }
  double lambda() const { return lambda_; }

  Vector apply(const Vector& v) const;
  Matrix apply(const Matrix& v) const;

  /// Throws SingularCore when the r×r core is singular or too ill-conditioned.
  Vector apply_inverse(const Vector& v) const;
  Matrix apply_inverse(const Matrix& v) const;

  /// Ratio of extreme core eigenvalue magnitudes (infinity when singular).
  double core_condition() const { return core_condition_; }
  bool invertible() const { return core_condition_ <= kMaxCoreCondition; }

  Matrix materialize() const;
  Matrix materialize_inverse() const;

 private:
  void check_length(Index n) const;
  void require_invertible() const;

  Matrix v1_;
  Vector sigma_;
  Matrix z1_;
  Matrix z2_;
  ReferenceOperator zref_;
  double lambda_;

  Matrix e_;
  Matrix core_vectors_;
  Vector core_values_;
  double core_condition_ = 0.0;
};

/// Relative singular-value tolerance for full column rank when λ = 0.
inline constexpr double kRankTolerance = 1e-12;

/// Closed-form solution. With λ > 0 every column direction of A is kept; with
/// λ = 0, A must have full column rank (σ_min > 1e-12·σ_max) or RankDeficient
/// is thrown.
RspFactors factorize(const RspProblem& problem);

/// Same with λ = λ̄·σ_max(A)², sharing the SVD between scaling and solve.
RspFactors factorize_relative(const Matrix& a, const Matrix& d, double lambda_bar,
                              const ReferenceOperator& zref);

/// Replaces Z1 so that the full operator satisfies Z ⪰ σ·I. Only the r×r
/// Schur complement χ = Z1 − Z2·Wσ·Z2ᵀ (Wσ built from Zref − σI) is
/// eigendecomposed and clamped at σ. Needs σ < λ_min(Zref).
RspFactors psd_project(const RspFactors& factors, double sigma_floor);

/// Dense solution of the problem over an orthonormal basis of symmetric
/// matrices. O(d⁶); limited to d ≤ 40. For λ = 0 returns the minimum-norm
/// correction of Zref that solves the least-squares problem.
Matrix brute_force_oracle(const RspProblem& problem);

struct BiasBound {
  double measured = 0.0;
  double bound = 0.0;
};

/// ‖Z(λ) − Z(0)‖_F against 5λ‖Z(0) − Zref‖_F / (σ_min(A)² + λ).
BiasBound bias_bound(const RspFactors& factors_lambda, const RspFactors& factors_zero);

}  // namespace msqn
