#include <cmath>
#include <vector>

#include <Eigen/QR>

#include "msqn/error.hpp"
#include "msqn/rsp.hpp"

namespace msqn {

Matrix brute_force_oracle(const RspProblem& problem) {
  const Index d = problem.a.rows();
  const Index m = problem.a.cols();
  if (d > 40) throw InvalidArgument("brute-force oracle is limited to d <= 40");
  if (problem.d.rows() != d || problem.d.cols() != m) {
    throw DimensionMismatch("oracle: A and D differ in shape");
  }
  if (!(problem.lambda >= 0.0)) throw InvalidArgument("oracle: negative lambda");

  // Orthonormal basis of symmetric matrices: E_ii and (E_ij + E_ji)/√2.
  struct Pair { Index i, j; };
  std::vector<Pair> basis;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) basis.push_back({i, j});
  }
  const Index n = static_cast<Index>(basis.size());
  const double h = 1.0 / std::sqrt(2.0);
  const Matrix zr = problem.zref.materialize(d);

  // Column k is vec(B_k·A) in column-major order.
  Matrix k(d * m, n);
  k.setZero();
  Vector zr_coords(n);
  for (Index b = 0; b < n; ++b) {
    const auto [i, j] = basis[b];
    for (Index c = 0; c < m; ++c) {
      if (i == j) {
        k(i + c * d, b) = problem.a(i, c);
      } else {
        k(i + c * d, b) = h * problem.a(j, c);
        k(j + c * d, b) = h * problem.a(i, c);
      }
    }
    zr_coords(b) = i == j ? zr(i, i) : h * (zr(i, j) + zr(j, i));
  }
  const Vector rhs = problem.d.reshaped();

  Vector z;
  if (problem.lambda == 0.0) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(k);
    z = zr_coords + cod.solve(Vector(rhs - k * zr_coords));
  } else {
    const double w = std::sqrt(problem.lambda / 2.0);
    Matrix stacked(d * m + n, n);
    stacked << k, w * Matrix::Identity(n, n);
    Vector target(d * m + n);
    target << rhs, w * zr_coords;
    z = stacked.colPivHouseholderQr().solve(target);
  }

  Matrix out = Matrix::Zero(d, d);
  for (Index b = 0; b < n; ++b) {
    const auto [i, j] = basis[b];
    if (i == j) {
      out(i, i) = z(b);
    } else {
      out(i, j) = out(j, i) = h * z(b);
    }
  }
  return out;
}

}  // namespace msqn
