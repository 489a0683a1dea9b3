#pragma once
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "msqn/random.hpp"
#include "msqn/types.hpp"

namespace testutil {

using msqn::Index;
using msqn::Matrix;
using msqn::Vector;

inline Matrix spd(msqn::Rng& rng, Index d, double cond) {
  const Matrix u = msqn::random_orthogonal(rng, d);
  Vector ev(d);
  for (Index i = 0; i < d; ++i) ev(i) = std::pow(cond, -static_cast<double>(i) / std::max<Index>(1, d - 1));
  Matrix m = u * ev.asDiagonal() * u.transpose();
  return 0.5 * (m + m.transpose());
}

inline double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

inline double asym(const Matrix& m) { return (m - m.transpose()).norm() / m.norm(); }

inline double min_eig(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose())).eigenvalues()(0);
}

}  // namespace testutil
