#pragma once

#include "msqn/estimates.hpp"
#include "msqn/types.hpp"

namespace msqn {

/// Shrinks every singular value by ε·σ₁ and clamps at zero; singular vectors
/// are kept.
Matrix corrupt_worst_case(const Matrix& m, double eps);

/// ‖H·ΔG − ΔX‖_F / ‖ΔX‖_F, with ΔG the clean gradient differences.
double recovery_error(const InverseHessianEstimate& h, const Matrix& dg, const Matrix& dx);
double recovery_error(const Matrix& h, const Matrix& dg, const Matrix& dx);

}  // namespace msqn
