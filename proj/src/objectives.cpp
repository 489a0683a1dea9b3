#include "msqn/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "msqn/error.hpp"
#include "msqn/random.hpp"

namespace msqn {

QuadraticObjective::QuadraticObjective(Matrix q, Vector x_star, double f_star)
    : q_(std::move(q)), x_star_(std::move(x_star)), f_star_(f_star) {
  if (q_.rows() != q_.cols() || q_.rows() != x_star_.size() || q_.rows() == 0) {
    throw DimensionMismatch("quadratic: Q must be square and match x_star");
  }
  const double scale = q_.cwiseAbs().maxCoeff();
  if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw InvalidArgument("quadratic: Q is not symmetric");
  }
  q_ = 0.5 * (q_ + q_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q_, Eigen::EigenvaluesOnly);
  eigenvalues_ = eig.eigenvalues();
  if (!(eigenvalues_(0) > 0.0)) throw NotPositiveDefinite("quadratic: Q is not positive definite");
}

double QuadraticObjective::value(const Vector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("quadratic: point has wrong length");
  const Vector r = x - x_star_;
  return 0.5 * r.dot(q_ * r) + f_star_;
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("quadratic: point has wrong length");
  return q_ * (x - x_star_);
}

RegressionObjective::RegressionObjective(RowMatrix data, Vector labels, Loss loss, double tau)
    : data_(std::move(data)), labels_(std::move(labels)), loss_(loss), tau_(tau) {
  if (data_.rows() == 0 || data_.cols() == 0) throw InvalidArgument("regression: empty data");
  if (data_.rows() != labels_.size()) {
    throw DimensionMismatch("regression: " + std::to_string(data_.rows()) + " rows but " +
                            std::to_string(labels_.size()) + " labels");
  }
  if (!data_.allFinite() || !labels_.allFinite()) {
    throw InvalidArgument("regression: non-finite data");
  }
  if (!(tau_ >= 0.0)) throw InvalidArgument("regression: tau must be nonnegative");
  const double factor = loss_ == Loss::Logistic ? 0.25 : 1.0;
  const Matrix gram = data_.transpose() * data_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  lipschitz_ = factor * top / static_cast<double>(data_.rows()) + tau_;
  max_sample_lipschitz_ = factor * data_.rowwise().squaredNorm().maxCoeff() + tau_;
}

double RegressionObjective::value(const Vector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("regression: point has wrong length");
  return regression_parallel(data_, labels_, loss_, x, false).value + 0.5 * tau_ * x.squaredNorm();
}

Vector RegressionObjective::gradient(const Vector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("regression: point has wrong length");
  return regression_parallel(data_, labels_, loss_, x, true).gradient + tau_ * x;
}

double RegressionObjective::sample_derivative(Index i, const Vector& x) const {
  return loss_derivative(loss_, data_.row(i).dot(x), labels_(i));
}

namespace {

Vector log_uniform_spectrum(Index d, double kappa) {
  if (!(kappa >= 1.0)) throw InvalidArgument("condition number must be at least 1");
  Vector ev(d);
  for (Index i = 0; i < d; ++i) {
    const double t = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
    ev(i) = std::exp(-t * std::log(kappa));
  }
  return ev;
}

}  // namespace

QuadraticObjective quadratic_from_spectrum(const Vector& eigenvalues, std::uint64_t seed) {
  Rng rng(seed);
  const Index d = eigenvalues.size();
  const Matrix u = random_orthogonal(rng, d);
  Matrix q = u * eigenvalues.asDiagonal() * u.transpose();
  q = 0.5 * (q + q.transpose()).eval();
  Vector x_star = gaussian_vector(rng, d);
  return QuadraticObjective(std::move(q), std::move(x_star), 0.0);
}

QuadraticObjective synthetic_quadratic(Index d, double kappa, std::uint64_t seed) {
  return quadratic_from_spectrum(log_uniform_spectrum(d, kappa), seed);
}

RegressionObjective synthetic_regression(Index n, Index d, double kappa, Loss loss, double tau,
                                         std::uint64_t seed) {
  if (n < d) throw InvalidArgument("synthetic regression needs at least as many samples as features");
  Rng rng(seed);
  const Matrix u = random_orthonormal_columns(rng, n, d);
  const Matrix v = random_orthogonal(rng, d);
  const Vector s = (log_uniform_spectrum(d, kappa) * static_cast<double>(n)).cwiseSqrt();
  RowMatrix a = u * s.asDiagonal() * v.transpose();
  const Vector x_true = gaussian_vector(rng, d);
  const Vector noise = gaussian_vector(rng, n);
  Vector b = a * x_true + 0.1 * noise;
  if (loss == Loss::Logistic) {
    for (Index i = 0; i < n; ++i) b(i) = b(i) >= 0.0 ? 1.0 : -1.0;
  }
  return RegressionObjective(std::move(a), std::move(b), loss, tau);
}

}  // namespace msqn
