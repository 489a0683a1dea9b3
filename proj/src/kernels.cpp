#include "msqn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "msqn/error.hpp"

namespace msqn {

double loss_value(Loss loss, double z, double b) {
  if (loss == Loss::Square) return 0.5 * (z - b) * (z - b);
  const double t = -b * z;
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double loss_derivative(Loss loss, double z, double b) {
  if (loss == Loss::Square) return z - b;
  const double t = b * z;
  // −b·σ(−t), written to avoid overflow for large |t|.
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return -b * e / (1.0 + e);
  }
  return -b / (1.0 + std::exp(t));
}

namespace {

void check_shapes(const RowMatrix& a, const Vector& b, const Vector& x) {
  if (a.rows() != b.size() || a.cols() != x.size()) {
    throw DimensionMismatch("regression kernel: data, labels and point disagree in shape");
  }
  if (a.rows() == 0) throw InvalidArgument("regression kernel: no samples");
}

}  // namespace

LossAndGradient regression_serial(const RowMatrix& a, const Vector& b, Loss loss, const Vector& x,
                                  bool with_gradient) {
  check_shapes(a, b, x);
  const Index n = a.rows();
  LossAndGradient out;
  if (with_gradient) out.gradient = Vector::Zero(a.cols());
  for (Index i = 0; i < n; ++i) {
    const double z = a.row(i).dot(x);
    out.value += loss_value(loss, z, b(i));
    if (with_gradient) out.gradient += loss_derivative(loss, z, b(i)) * a.row(i).transpose();
  }
  out.value /= static_cast<double>(n);
  if (with_gradient) out.gradient /= static_cast<double>(n);
  return out;
}

LossAndGradient regression_parallel(const RowMatrix& a, const Vector& b, Loss loss,
                                    const Vector& x, bool with_gradient) {
  check_shapes(a, b, x);
  const Index n = a.rows();
  const Index d = a.cols();
  const Index chunks = (n + kRowChunk - 1) / kRowChunk;
  std::vector<double> values(static_cast<std::size_t>(chunks), 0.0);
  Matrix grads = with_gradient ? Matrix::Zero(d, chunks) : Matrix(0, 0);

#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const Index start = c * kRowChunk;
    const Index len = std::min(kRowChunk, n - start);
    const auto rows = a.middleRows(start, len);
    const Vector z = rows * x;
    Vector r(len);
    double v = 0.0;
    for (Index i = 0; i < len; ++i) {
      v += loss_value(loss, z(i), b(start + i));
      r(i) = loss_derivative(loss, z(i), b(start + i));
    }
    values[static_cast<std::size_t>(c)] = v;
    if (with_gradient) grads.col(c).noalias() = rows.transpose() * r;
  }

  LossAndGradient out;
  for (double v : values) out.value += v;
  out.value /= static_cast<double>(n);
  if (with_gradient) {
    out.gradient = Vector::Zero(d);
    for (Index c = 0; c < chunks; ++c) out.gradient += grads.col(c);
    out.gradient /= static_cast<double>(n);
  }
  return out;
}

}  // namespace msqn
