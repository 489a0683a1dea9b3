#include "msqn/secant_history.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msqn/error.hpp"

namespace msqn {

DifferenceOperator DifferenceOperator::explicit_matrix(Matrix c) {
  if (c.rows() != c.cols() + 1) {
    throw DimensionMismatch("difference matrix must be (m+1)×m, got " + std::to_string(c.rows()) +
                            "×" + std::to_string(c.cols()));
  }
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if (c.cols() > 0 && c.colwise().sum().cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("difference matrix columns must sum to zero");
  }
  if (c.cols() > 0) {
    Eigen::JacobiSVD<Matrix> svd(c);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-12 * s(0)) {
      throw InvalidArgument("difference matrix must have full column rank");
    }
  }
  DifferenceOperator op;
  op.c_ = std::move(c);
  return op;
}

Matrix DifferenceOperator::matrix(Index points) const {
  if (c_) {
    if (c_->rows() != points) {
      throw DimensionMismatch("difference matrix has " + std::to_string(c_->rows()) +
                              " rows but history holds " + std::to_string(points) + " entries");
    }
    return *c_;
  }
  const Index m = std::max<Index>(points - 1, 0);
  Matrix c = Matrix::Zero(points, m);
  for (Index j = 0; j < m; ++j) {
    c(j, j) = -1.0;
    c(j + 1, j) = 1.0;
  }
  return c;
}

SecantHistory::SecantHistory(Index dimension, std::size_t capacity)
    : dim_(dimension), capacity_(capacity) {
  if (dimension <= 0) throw InvalidArgument("history dimension must be positive");
  if (capacity == 0) throw InvalidArgument("history capacity must be positive");
}

void SecantHistory::push(const Vector& x, const Vector& g) {
  if (x.size() != dim_ || g.size() != dim_) {
    throw DimensionMismatch("push: expected vectors of dimension " + std::to_string(dim_) +
                            ", got x:" + std::to_string(x.size()) + " g:" + std::to_string(g.size()));
  }
  xs_.push_back(x);
  gs_.push_back(g);
  while (xs_.size() > capacity_ + 1) {
    xs_.pop_front();
    gs_.pop_front();
  }
}

Matrix SecantHistory::iterates() const {
  Matrix out(dim_, static_cast<Index>(xs_.size()));
  for (std::size_t i = 0; i < xs_.size(); ++i) out.col(static_cast<Index>(i)) = xs_[i];
  return out;
}

Matrix SecantHistory::gradients() const {
  Matrix out(dim_, static_cast<Index>(gs_.size()));
  for (std::size_t i = 0; i < gs_.size(); ++i) out.col(static_cast<Index>(i)) = gs_[i];
  return out;
}

SecantDeltas SecantHistory::deltas() const {
  const Index k = xs_.size() < 2 ? 0 : static_cast<Index>(xs_.size() - 1);
  SecantDeltas out{Matrix(dim_, k), Matrix(dim_, k)};
  for (Index j = 0; j < k; ++j) {
    out.dx.col(j) = xs_[j + 1] - xs_[j];
    out.dg.col(j) = gs_[j + 1] - gs_[j];
  }
  return out;
}

SecantDeltas SecantHistory::deltas(const DifferenceOperator& diff) const {
  if (diff.is_consecutive()) return deltas();
  const Matrix c = diff.matrix(static_cast<Index>(xs_.size()));
  return {iterates() * c, gradients() * c};
}

std::pair<Vector, Vector> SecantHistory::combine(const Vector& v) const {
  if (v.size() != static_cast<Index>(xs_.size())) {
    throw DimensionMismatch("combine: coefficient vector has length " + std::to_string(v.size()) +
                            ", history holds " + std::to_string(xs_.size()));
  }
  if (std::abs(v.sum() - 1.0) > 1e-12 * std::max(1.0, v.cwiseAbs().sum())) {
    throw InvalidArgument("combine: coefficients must sum to one");
  }
  Vector xv = Vector::Zero(dim_);
  Vector gv = Vector::Zero(dim_);
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    xv.noalias() += v(static_cast<Index>(i)) * xs_[i];
    gv.noalias() += v(static_cast<Index>(i)) * gs_[i];
  }
  return {xv, gv};
}

}  // namespace msqn
