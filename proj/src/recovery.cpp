#include "msqn/recovery.hpp"

#include <Eigen/SVD>

#include "msqn/error.hpp"

namespace msqn {

Matrix corrupt_worst_case(const Matrix& m, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("corruption level must lie in [0, 1]");
  if (m.size() == 0) return m;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const Vector shrunk = (s.array() - eps * s(0)).cwiseMax(0.0);
  return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

namespace {

double relative_residual(const Matrix& hdg, const Matrix& dx) {
  const double denom = dx.norm();
  if (denom == 0.0) throw InvalidArgument("recovery error is undefined for zero ΔX");
  return (hdg - dx).norm() / denom;
}

}  // namespace

double recovery_error(const InverseHessianEstimate& h, const Matrix& dg, const Matrix& dx) {
  if (dg.rows() != dx.rows() || dg.cols() != dx.cols()) {
    throw DimensionMismatch("recovery error: ΔG and ΔX differ in shape");
  }
  return relative_residual(h.apply(dg), dx);
}

double recovery_error(const Matrix& h, const Matrix& dg, const Matrix& dx) {
  if (dg.rows() != dx.rows() || dg.cols() != dx.cols() || h.cols() != dg.rows()) {
    throw DimensionMismatch("recovery error: shapes disagree");
  }
  return relative_residual(h * dg, dx);
}

}  // namespace msqn
