#pragma once

#include "msqn/types.hpp"

namespace msqn {

enum class Loss { Square, Logistic };

/// ℓ(z, b): ½(z − b)² or log(1 + exp(−b·z)).
double loss_value(Loss loss, double z, double b);
/// ∂ℓ/∂z.
double loss_derivative(Loss loss, double z, double b);

struct LossAndGradient {
  double value = 0.0;
  Vector gradient;
};

/// (1/N)·Σ ℓ(aᵢᵀx, bᵢ) and its gradient, one row at a time. Reference
/// implementation for tests and benchmarks.
LossAndGradient regression_serial(const RowMatrix& a, const Vector& b, Loss loss, const Vector& x,
                                  bool with_gradient = true);

/// Same sums over fixed row chunks processed with OpenMP and combined in chunk
/// order, so the result does not depend on the thread count.
LossAndGradient regression_parallel(const RowMatrix& a, const Vector& b, Loss loss,
                                    const Vector& x, bool with_gradient = true);

inline constexpr Index kRowChunk = 256;

}  // namespace msqn
