#include "msqn/reference_operator.hpp"

#include <cmath>
#include <string>

#include "msqn/error.hpp"

namespace msqn {

struct ReferenceOperator::DenseData {
  Matrix m;
  Matrix eigenvectors;
  Vector eigenvalues;
};

ReferenceOperator ReferenceOperator::scaled_identity(double c) {
  if (!std::isfinite(c) || c == 0.0) {
    throw InvalidArgument("scaled-identity reference needs a finite nonzero scale");
  }
  ReferenceOperator op;
  op.scale_ = c;
  return op;
}

ReferenceOperator ReferenceOperator::dense(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch("dense reference must be a nonempty square matrix");
  }
  auto data = std::make_shared<DenseData>();
  data->m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(data->m);
  data->eigenvalues = eig.eigenvalues();
  data->eigenvectors = eig.eigenvectors();
  const double largest = data->eigenvalues.cwiseAbs().maxCoeff();
  if (data->eigenvalues.cwiseAbs().minCoeff() <= 1e-14 * largest) {
    throw InvalidArgument("dense reference must be invertible");
  }
  ReferenceOperator op;
  op.scale_ = data->eigenvalues.maxCoeff();
  op.dense_ = std::move(data);
  return op;
}

double ReferenceOperator::scale() const { return scale_; }

std::optional<Index> ReferenceOperator::dim() const {
  if (!dense_) return std::nullopt;
  return dense_->m.rows();
}

namespace {

void check_rows(const std::optional<Index>& dim, Index rows) {
  if (dim && *dim != rows) {
    throw DimensionMismatch("reference operator of dimension " + std::to_string(*dim) +
                            " applied to length " + std::to_string(rows));
  }
}

}  // namespace

Vector ReferenceOperator::apply(const Vector& v) const {
  if (!dense_) return scale_ * v;
  check_rows(dim(), v.size());
  return dense_->m * v;
}

Matrix ReferenceOperator::apply(const Matrix& v) const {
  if (!dense_) return scale_ * v;
  check_rows(dim(), v.rows());
  return dense_->m * v;
}

Vector ReferenceOperator::apply_inverse(const Vector& v) const {
  if (!dense_) return v / scale_;
  check_rows(dim(), v.size());
  const auto& q = dense_->eigenvectors;
  return q * ((q.transpose() * v).cwiseQuotient(dense_->eigenvalues));
}

Matrix ReferenceOperator::apply_inverse(const Matrix& v) const {
  if (!dense_) return v / scale_;
  check_rows(dim(), v.rows());
  const auto& q = dense_->eigenvectors;
  return q * (dense_->eigenvalues.cwiseInverse().asDiagonal() * (q.transpose() * v));
}

double ReferenceOperator::min_eigenvalue() const {
  return dense_ ? dense_->eigenvalues.minCoeff() : scale_;
}

double ReferenceOperator::max_eigenvalue() const {
  return dense_ ? dense_->eigenvalues.maxCoeff() : scale_;
}

ReferenceOperator ReferenceOperator::shifted(double sigma) const {
  if (!dense_) return scaled_identity(scale_ - sigma);
  return dense(dense_->m - sigma * Matrix::Identity(dense_->m.rows(), dense_->m.cols()));
}

Matrix ReferenceOperator::materialize(Index d) const {
  if (!dense_) return scale_ * Matrix::Identity(d, d);
  check_rows(dim(), d);
  return dense_->m;
}

}  // namespace msqn
