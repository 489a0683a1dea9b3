#include "msqn/rsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "msqn/error.hpp"

namespace msqn {

namespace {

// W = V2(V2ᵀ Zref V2)⁻¹V2ᵀ = Zr⁻¹ − Zr⁻¹V1(V1ᵀZr⁻¹V1)⁻¹V1ᵀZr⁻¹.
class ComplementInverse {
 public:
  ComplementInverse(const ReferenceOperator& zref, const Matrix& v1) : zref_(zref), v1_(v1) {
    if (!zref_.is_scaled_identity() && v1_.cols() > 0) {
      f_ = zref_.apply_inverse(v1_);
      gram_.compute(v1_.transpose() * f_);
    }
  }

  Matrix apply(const Matrix& m) const {
    if (zref_.is_scaled_identity()) {
      return (m - v1_ * (v1_.transpose() * m)) / zref_.scale();
    }
    Matrix out = zref_.apply_inverse(m);
    if (v1_.cols() > 0) out -= f_ * gram_.solve(f_.transpose() * m);
    return out;
  }

 private:
  const ReferenceOperator& zref_;
  const Matrix& v1_;
  Matrix f_;
  Eigen::LDLT<Matrix> gram_;
};

void check_problem(const RspProblem& p) {
  if (p.a.rows() != p.d.rows() || p.a.cols() != p.d.cols()) {
    throw DimensionMismatch("RSP: A is " + std::to_string(p.a.rows()) + "x" +
                            std::to_string(p.a.cols()) + " but D is " + std::to_string(p.d.rows()) +
                            "x" + std::to_string(p.d.cols()));
  }
  if (p.a.cols() > p.a.rows()) {
    throw DimensionMismatch("RSP: more secant columns than the dimension");
  }
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) {
    throw InvalidArgument("RSP: lambda must be finite and nonnegative");
  }
  if (auto n = p.zref.dim(); n && *n != p.a.rows()) {
    throw DimensionMismatch("RSP: reference dimension differs from A");
  }
}

RspFactors solve(const RspProblem& p, const Matrix& u, const Vector& s) {
  const Index d = p.a.rows();
  const Index m = p.a.cols();
  const double lambda = p.lambda;
  const double smax = s.size() > 0 ? s(0) : 0.0;

  if (lambda == 0.0 && m > 0 && !(s(m - 1) > kRankTolerance * smax)) {
    throw RankDeficient("RSP with lambda = 0 needs A of full column rank");
  }

  const Matrix& v1 = u;
  const Index r = v1.cols();
  const Matrix va = v1.transpose() * p.a;     // r×m
  const Matrix dtv = p.d.transpose() * v1;    // m×r
  const Matrix zv = p.zref.apply(v1);         // d×r

  const Matrix mix = va * dtv;
  Matrix z1 = mix + mix.transpose() + lambda * (v1.transpose() * zv);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < r; ++j) {
      const double den = s(i) * s(i) + s(j) * s(j) + lambda;
      z1(i, j) = den > 0.0 ? z1(i, j) / den : 0.0;
    }
  }
  z1 = 0.5 * (z1 + z1.transpose()).eval();

  Matrix rhs = va * p.d.transpose() + lambda * zv.transpose();  // r×d
  rhs -= (rhs * v1) * v1.transpose();
  for (Index i = 0; i < r; ++i) {
    const double den = s(i) * s(i) + lambda;
    rhs.row(i) = den > 0.0 ? (rhs.row(i) / den).eval() : Eigen::RowVectorXd::Zero(d).eval();
  }
  return RspFactors(v1, s, std::move(z1), std::move(rhs), p.zref, lambda);
}

Eigen::JacobiSVD<Matrix> thin_svd(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a, Eigen::ComputeThinU);
}

}  // namespace

RspFactors::RspFactors(Matrix v1, Vector sigma, Matrix z1, Matrix z2, ReferenceOperator zref,
                       double lambda)
    : v1_(std::move(v1)),
      sigma_(std::move(sigma)),
      z1_(std::move(z1)),
      z2_(std::move(z2)),
      zref_(std::move(zref)),
      lambda_(lambda) {
  const Index r = v1_.cols();
  if (z1_.rows() != r || z1_.cols() != r || z2_.rows() != r || z2_.cols() != v1_.rows() ||
      sigma_.size() != r) {
    throw DimensionMismatch("RspFactors: inconsistent factor shapes");
  }
  if (auto n = zref_.dim(); n && *n != v1_.rows()) {
    throw DimensionMismatch("RspFactors: reference dimension differs from V1");
  }
  if (r == 0) {
    e_ = Matrix(v1_.rows(), 0);
    core_condition_ = 1.0;
    return;
  }
  const ComplementInverse w(zref_, v1_);
  const Matrix wz2t = w.apply(z2_.transpose());
  e_ = v1_ - wz2t;
  Matrix core = z1_ - z2_ * wz2t;
  core = 0.5 * (core + core.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(core);
  core_values_ = eig.eigenvalues();
  core_vectors_ = eig.eigenvectors();
  const double lo = core_values_.cwiseAbs().minCoeff();
  const double hi = core_values_.cwiseAbs().maxCoeff();
  core_condition_ = (lo > 0.0 && std::isfinite(hi)) ? hi / lo : std::numeric_limits<double>::infinity();
}

void RspFactors::check_length(Index n) const {
  if (n != dim()) {
    throw DimensionMismatch("RSP operator of dimension " + std::to_string(dim()) +
                            " applied to length " + std::to_string(n));
  }
}

void RspFactors::require_invertible() const {
  if (!invertible()) {
    throw SingularCore("RSP core is singular (condition " + std::to_string(core_condition_) + ")");
  }
}

Matrix RspFactors::apply(const Matrix& v) const {
  check_length(v.rows());
  const Matrix a = v1_.transpose() * v;
  Matrix t = zref_.apply(Matrix(v - v1_ * a));
  t -= v1_ * (v1_.transpose() * t);
  t += v1_ * (z1_ * a + z2_ * v);
  t += z2_.transpose() * a;
  return t;
}

Vector RspFactors::apply(const Vector& v) const { return apply(Matrix(v)).col(0); }

Matrix RspFactors::apply_inverse(const Matrix& v) const {
  check_length(v.rows());
  require_invertible();
  const ComplementInverse w(zref_, v1_);
  Matrix out = w.apply(v);
  if (rank() > 0) {
    const Matrix c = core_vectors_.transpose() * (e_.transpose() * v);
    out += e_ * (core_vectors_ * (core_values_.cwiseInverse().asDiagonal() * c));
  }
  return out;
}

Vector RspFactors::apply_inverse(const Vector& v) const { return apply_inverse(Matrix(v)).col(0); }

Matrix RspFactors::materialize() const {
  Matrix z = apply(Matrix(Matrix::Identity(dim(), dim())));
  return 0.5 * (z + z.transpose());
}

Matrix RspFactors::materialize_inverse() const {
  Matrix z = apply_inverse(Matrix(Matrix::Identity(dim(), dim())));
  return 0.5 * (z + z.transpose());
}

RspFactors factorize(const RspProblem& problem) {
  check_problem(problem);
  if (problem.a.cols() == 0) {
    return RspFactors(Matrix(problem.a.rows(), 0), Vector(0), Matrix(0, 0),
                      Matrix(0, problem.a.rows()), problem.zref, problem.lambda);
  }
  const auto svd = thin_svd(problem.a);
  return solve(problem, svd.matrixU(), svd.singularValues());
}

RspFactors factorize_relative(const Matrix& a, const Matrix& d, double lambda_bar,
                              const ReferenceOperator& zref) {
  if (!(lambda_bar >= 0.0) || !std::isfinite(lambda_bar)) {
    throw InvalidArgument("RSP: relative lambda must be finite and nonnegative");
  }
  RspProblem p{a, d, 0.0, zref};
  check_problem(p);
  if (a.cols() == 0) return factorize(p);
  const auto svd = thin_svd(a);
  const double smax = svd.singularValues()(0);
  p.lambda = lambda_bar * smax * smax;
  return solve(p, svd.matrixU(), svd.singularValues());
}

RspFactors psd_project(const RspFactors& factors, double sigma_floor) {
  if (!(sigma_floor >= 0.0) || !std::isfinite(sigma_floor)) {
    throw InvalidArgument("PSD floor must be finite and nonnegative");
  }
  const ReferenceOperator& zref = factors.zref();
  if (!zref.positive_definite()) {
    throw NotPositiveDefinite("PSD projection needs a positive definite reference");
  }
  if (!(sigma_floor < zref.min_eigenvalue())) {
    throw NotPositiveDefinite("PSD floor must lie below the smallest reference eigenvalue");
  }
  if (factors.rank() == 0) return factors;

  const ReferenceOperator shifted = zref.shifted(sigma_floor);
  const ComplementInverse w(shifted, factors.v1());
  Matrix coupling = factors.z2() * w.apply(factors.z2().transpose());
  coupling = 0.5 * (coupling + coupling.transpose()).eval();
  Matrix chi = factors.z1() - coupling;
  chi = 0.5 * (chi + chi.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(chi);
  if (eig.eigenvalues().minCoeff() >= sigma_floor) return factors;
  const Vector clamped = eig.eigenvalues().cwiseMax(sigma_floor);
  Matrix z1 = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose() + coupling;
  z1 = 0.5 * (z1 + z1.transpose()).eval();
  return RspFactors(factors.v1(), factors.sigma(), std::move(z1), factors.z2(), zref,
                    factors.lambda());
}

BiasBound bias_bound(const RspFactors& factors_lambda, const RspFactors& factors_zero) {
  if (factors_lambda.dim() != factors_zero.dim()) {
    throw DimensionMismatch("bias bound: factorizations of different dimension");
  }
  const Index d = factors_zero.dim();
  const Matrix z0 = factors_zero.materialize();
  const double measured = (factors_lambda.materialize() - z0).norm();
  const double lambda = factors_lambda.lambda();
  if (lambda == 0.0) return {measured, 0.0};
  const double smin =
      factors_zero.rank() > 0 ? factors_zero.sigma().minCoeff() : 0.0;
  const double gap = (z0 - factors_zero.zref().materialize(d)).norm();
  return {measured, 5.0 * lambda * gap / (smin * smin + lambda)};
}

}  // namespace msqn
