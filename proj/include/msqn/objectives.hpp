#pragma once

#include <cstdint>

#include "msqn/kernels.hpp"
#include "msqn/types.hpp"

namespace msqn {

class Objective {
 public:
  virtual ~Objective() = default;
  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  /// Smoothness constant L of the full objective.
  virtual double lipschitz() const = 0;
};

/// f(x) = ½(x − x⋆)ᵀQ(x − x⋆) + f⋆ with Q symmetric positive definite.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Matrix q, Vector x_star, double f_star = 0.0);

  Index dim() const override { return q_.rows(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double lipschitz() const override { return eigenvalues_(eigenvalues_.size() - 1); }
  double strong_convexity() const { return eigenvalues_(0); }
  double condition_number() const { return lipschitz() / strong_convexity(); }

  const Matrix& q() const { return q_; }
  const Vector& x_star() const { return x_star_; }
  double f_star() const { return f_star_; }
  /// Ascending.
  const Vector& eigenvalues() const { return eigenvalues_; }

 private:
  Matrix q_;
  Vector x_star_;
  double f_star_;
  Vector eigenvalues_;
};

/// f(x) = (1/N)·Σ ℓ(aᵢᵀx, bᵢ) + (τ/2)‖x‖².
class RegressionObjective final : public Objective {
 public:
  RegressionObjective(RowMatrix data, Vector labels, Loss loss, double tau);

  Index dim() const override { return data_.cols(); }
  Index samples() const { return data_.rows(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  /// λ_max(AᵀA)/N (quartered for the logistic loss) + τ.
  double lipschitz() const override { return lipschitz_; }
  /// maxᵢ ‖aᵢ‖² (quartered for the logistic loss) + τ.
  double max_sample_lipschitz() const { return max_sample_lipschitz_; }

  /// ℓ′(aᵢᵀx, bᵢ); the sample gradient is this scalar times aᵢ.
  double sample_derivative(Index i, const Vector& x) const;

  const RowMatrix& data() const { return data_; }
  const Vector& labels() const { return labels_; }
  Loss loss() const { return loss_; }
  double tau() const { return tau_; }

 private:
  RowMatrix data_;
  Vector labels_;
  Loss loss_;
  double tau_;
  double lipschitz_ = 0.0;
  double max_sample_lipschitz_ = 0.0;
};

/// Random rotation of the given spectrum.
QuadraticObjective quadratic_from_spectrum(const Vector& eigenvalues, std::uint64_t seed);

/// Spectrum log-uniform on [1/κ, 1] with both endpoints present; L = 1.
QuadraticObjective synthetic_quadratic(Index d, double kappa, std::uint64_t seed);

/// Features A = U·diag(s)·Vᵀ with AᵀA/N having a log-uniform spectrum on
/// [1/κ, 1]. Square loss: b = A·x_true + 0.1·noise. Logistic: b = sign of a
/// noisy linear score.
RegressionObjective synthetic_regression(Index n, Index d, double kappa, Loss loss, double tau,
                                         std::uint64_t seed);

}  // namespace msqn
