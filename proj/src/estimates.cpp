#include "msqn/estimates.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "msqn/error.hpp"

namespace msqn {

namespace {

class ScaledIdentityOp final : public InverseHessianEstimate::Operator {
 public:
  explicit ScaledIdentityOp(double inv_scale) : inv_scale_(inv_scale) {}
  Matrix apply(const Matrix& v) const override { return inv_scale_ * v; }

 private:
  double inv_scale_;
};

class DenseOp final : public InverseHessianEstimate::Operator {
 public:
  explicit DenseOp(Matrix h) : h_(std::move(h)) {}
  Matrix apply(const Matrix& v) const override { return h_ * v; }

 private:
  Matrix h_;
};

class RspForwardOp final : public InverseHessianEstimate::Operator {
 public:
  explicit RspForwardOp(RspFactors f) : f_(std::move(f)) {}
  Matrix apply(const Matrix& v) const override { return f_.apply(v); }

 private:
  RspFactors f_;
};

class RspInverseOp final : public InverseHessianEstimate::Operator {
 public:
  explicit RspInverseOp(RspFactors f) : f_(std::move(f)) {}
  Matrix apply(const Matrix& v) const override { return f_.apply_inverse(v); }

 private:
  RspFactors f_;
};

class Broyden1Op final : public InverseHessianEstimate::Operator {
 public:
  Broyden1Op(Matrix left, Matrix dx, Eigen::PartialPivLU<Matrix> inner, double scale)
      : left_(std::move(left)), dx_(std::move(dx)), inner_(std::move(inner)), scale_(scale) {}
  Matrix apply(const Matrix& v) const override {
    return v / scale_ + left_ * inner_.solve(Matrix(dx_.transpose() * v / scale_));
  }

 private:
  Matrix left_;
  Matrix dx_;
  Eigen::PartialPivLU<Matrix> inner_;
  double scale_;
};

class Broyden2Op final : public InverseHessianEstimate::Operator {
 public:
  Broyden2Op(Matrix dx, Matrix u, Matrix pinv, double scale)
      : dx_(std::move(dx)), u_(std::move(u)), pinv_(std::move(pinv)), scale_(scale) {}
  Matrix apply(const Matrix& v) const override {
    return dx_ * (pinv_ * v) + (v - u_ * (u_.transpose() * v)) / scale_;
  }

 private:
  Matrix dx_;
  Matrix u_;     // orthonormal basis of range(ΔG)
  Matrix pinv_;  // ΔG†
  double scale_;
};

class LbfgsOp final : public InverseHessianEstimate::Operator {
 public:
  LbfgsOp(std::vector<Vector> s, std::vector<Vector> y, double scale)
      : s_(std::move(s)), y_(std::move(y)), scale_(scale) {
    for (std::size_t i = 0; i < s_.size(); ++i) rho_.push_back(1.0 / s_[i].dot(y_[i]));
  }
  Matrix apply(const Matrix& v) const override {
    const std::size_t k = s_.size();
    Matrix q = v;
    Matrix alpha(k, v.cols());
    for (std::size_t i = k; i-- > 0;) {
      alpha.row(i) = rho_[i] * (s_[i].transpose() * q);
      q -= y_[i] * alpha.row(i);
    }
    q /= scale_;
    for (std::size_t i = 0; i < k; ++i) {
      const Eigen::RowVectorXd beta = rho_[i] * (y_[i].transpose() * q);
      q += s_[i] * (alpha.row(i) - beta);
    }
    return q;
  }

 private:
  std::vector<Vector> s_;
  std::vector<Vector> y_;
  std::vector<double> rho_;
  double scale_;
};

class SemiImplicit2Op final : public InverseHessianEstimate::Operator {
 public:
  SemiImplicit2Op(Matrix dg, Matrix y, Eigen::PartialPivLU<Matrix> t, ReferenceOperator href)
      : dg_(std::move(dg)), y_(std::move(y)), t_(std::move(t)), href_(std::move(href)) {}
  Matrix apply(const Matrix& v) const override {
    const Matrix coef = t_.solve(Matrix(y_.transpose() * v));
    const Matrix u = href_.apply(Matrix(v - dg_ * coef));
    const Matrix back = t_.transpose().solve(Matrix(dg_.transpose() * u));
    return y_ * coef + u - y_ * back;
  }

 private:
  Matrix dg_;
  Matrix y_;
  Eigen::PartialPivLU<Matrix> t_;
  ReferenceOperator href_;
};

class SemiImplicit1Op final : public InverseHessianEstimate::Operator {
 public:
  SemiImplicit1Op(Matrix dx, Eigen::PartialPivLU<Matrix> t, Matrix f, Eigen::PartialPivLU<Matrix> g,
                  ReferenceOperator bref)
      : dx_(std::move(dx)), t_(std::move(t)), f_(std::move(f)), g_(std::move(g)),
        bref_(std::move(bref)) {}
  Matrix apply(const Matrix& v) const override {
    return dx_ * t_.solve(Matrix(dx_.transpose() * v)) + bref_.apply_inverse(v) -
           f_ * g_.solve(Matrix(f_.transpose() * v));
  }

 private:
  Matrix dx_;
  Eigen::PartialPivLU<Matrix> t_;
  Matrix f_;  // B_ref⁻¹U
  Eigen::PartialPivLU<Matrix> g_;
  ReferenceOperator bref_;
};

void check_pair(const Matrix& dx, const Matrix& dg) {
  if (dx.rows() != dg.rows() || dx.cols() != dg.cols()) {
    throw DimensionMismatch("secant blocks ΔX and ΔG differ in shape");
  }
}

void check_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("reference scale must be positive and finite");
  }
}

// Ratio of extreme singular values, infinity when singular.
double condition(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

constexpr double kInnerConditionLimit = 1e12;

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& m, const char* what) {
  if (!(condition(m) <= kInnerConditionLimit)) {
    throw SingularInnerMatrix(std::string(what) + " is singular or ill-conditioned");
  }
  return Eigen::PartialPivLU<Matrix>(m);
}

}  // namespace

InverseHessianEstimate::InverseHessianEstimate(std::shared_ptr<const Operator> op, Index dim,
                                               bool symmetric)
    : op_(std::move(op)), dim_(dim), symmetric_(symmetric) {}

InverseHessianEstimate InverseHessianEstimate::reference(Index dim, double scale) {
  check_scale(scale);
  return {std::make_shared<ScaledIdentityOp>(1.0 / scale), dim, true};
}

InverseHessianEstimate InverseHessianEstimate::dense(Matrix h, bool symmetric) {
  if (h.rows() != h.cols()) throw DimensionMismatch("dense estimate must be square");
  const Index d = h.rows();
  return {std::make_shared<DenseOp>(std::move(h)), d, symmetric};
}

InverseHessianEstimate InverseHessianEstimate::rsp_forward(RspFactors factors) {
  const Index d = factors.dim();
  return {std::make_shared<RspForwardOp>(std::move(factors)), d, true};
}

InverseHessianEstimate InverseHessianEstimate::rsp_inverse(RspFactors factors) {
  if (!factors.invertible()) throw SingularCore("RSP core is singular");
  const Index d = factors.dim();
  return {std::make_shared<RspInverseOp>(std::move(factors)), d, true};
}

Vector InverseHessianEstimate::apply(const Vector& v) const {
  return apply(Matrix(v)).col(0);
}

Matrix InverseHessianEstimate::apply(const Matrix& v) const {
  if (v.rows() != dim_) {
    throw DimensionMismatch("estimate of dimension " + std::to_string(dim_) +
                            " applied to length " + std::to_string(v.rows()));
  }
  return op_->apply(v);
}

Matrix InverseHessianEstimate::materialize() const {
  return apply(Matrix(Matrix::Identity(dim_, dim_)));
}

InverseHessianEstimate InverseHessianEstimate::with_fallback(std::string reason) const {
  InverseHessianEstimate out = *this;
  out.fallback_reason_ = std::move(reason);
  return out;
}

InverseHessianEstimate InverseHessianEstimate::with_note(std::string note) const {
  InverseHessianEstimate out = *this;
  out.note_ = std::move(note);
  return out;
}

bool passes_curvature_filter(const Vector& s, const Vector& y) {
  return s.dot(y) > kCurvatureTolerance * s.norm() * y.norm();
}

InverseHessianEstimate sym_type1_estimate(const Matrix& dx, const Matrix& dg, double lambda_bar,
                                          double scale, std::optional<double> psd_floor) {
  check_pair(dx, dg);
  check_scale(scale);
  const Index d = dx.rows();
  try {
    RspFactors f = factorize_relative(dx, dg, lambda_bar, ReferenceOperator::scaled_identity(scale));
    if (psd_floor) f = psd_project(f, *psd_floor * scale);
    return InverseHessianEstimate::rsp_inverse(std::move(f));
  } catch (const RankDeficient&) {
    return InverseHessianEstimate::reference(d, scale).with_fallback("rank_deficient");
  } catch (const SingularCore&) {
    return InverseHessianEstimate::reference(d, scale).with_fallback("singular_core");
  }
}

InverseHessianEstimate sym_type2_estimate(const Matrix& dx, const Matrix& dg, double lambda_bar,
                                          double scale, std::optional<double> psd_floor) {
  check_pair(dx, dg);
  check_scale(scale);
  const Index d = dx.rows();
  try {
    RspFactors f =
        factorize_relative(dg, dx, lambda_bar, ReferenceOperator::scaled_identity(1.0 / scale));
    if (psd_floor) f = psd_project(f, *psd_floor / scale);
    return InverseHessianEstimate::rsp_forward(std::move(f));
  } catch (const RankDeficient&) {
    return InverseHessianEstimate::reference(d, scale).with_fallback("rank_deficient");
  }
}

InverseHessianEstimate broyden1_estimate(const Matrix& dx, const Matrix& dg, double scale) {
  check_pair(dx, dg);
  check_scale(scale);
  const Index d = dx.rows();
  if (dx.cols() == 0) return InverseHessianEstimate::reference(d, scale);
  try {
    auto inner = checked_lu(Matrix(dx.transpose() * dg / scale), "Broyden inner matrix");
    Matrix left = dx - dg / scale;
    return {std::make_shared<Broyden1Op>(std::move(left), dx, std::move(inner), scale), d, false};
  } catch (const SingularInnerMatrix&) {
    return InverseHessianEstimate::reference(d, scale).with_fallback("singular_inner_matrix");
  }
}

InverseHessianEstimate broyden2_estimate(const Matrix& dx, const Matrix& dg, double scale) {
  check_pair(dx, dg);
  check_scale(scale);
  const Index d = dx.rows();
  const Index m = dx.cols();
  if (m == 0) return InverseHessianEstimate::reference(d, scale);
  Eigen::JacobiSVD<Matrix> svd(dg, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > kRankTolerance * s(0)) ++r;
  if (r == 0) {
    return InverseHessianEstimate::reference(d, scale).with_fallback("zero_gradient_differences");
  }
  Matrix u = svd.matrixU().leftCols(r);
  Matrix pinv = svd.matrixV().leftCols(r) * s.head(r).cwiseInverse().asDiagonal() * u.transpose();
  InverseHessianEstimate out{std::make_shared<Broyden2Op>(dx, std::move(u), std::move(pinv), scale),
                             d, false};
  if (r < m) out = out.with_note("rank_truncated");
  return out;
}

InverseHessianEstimate lbfgs_estimate(const Matrix& dx, const Matrix& dg, double scale) {
  check_pair(dx, dg);
  check_scale(scale);
  std::vector<Vector> s;
  std::vector<Vector> y;
  for (Index j = 0; j < dx.cols(); ++j) {
    if (passes_curvature_filter(dx.col(j), dg.col(j))) {
      s.emplace_back(dx.col(j));
      y.emplace_back(dg.col(j));
    }
  }
  const bool skipped = static_cast<Index>(s.size()) < dx.cols();
  InverseHessianEstimate out{std::make_shared<LbfgsOp>(std::move(s), std::move(y), scale),
                             dx.rows(), true};
  if (skipped) out = out.with_note("curvature_skipped");
  return out;
}

void bfgs_update(Matrix& h, const Vector& s, const Vector& y) {
  if (!passes_curvature_filter(s, y)) return;
  const double rho = 1.0 / s.dot(y);
  const Vector hy = h * y;
  const double yhy = y.dot(hy);
  h.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
  h.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
}

void dfp_update(Matrix& h, const Vector& s, const Vector& y) {
  if (!passes_curvature_filter(s, y)) return;
  const Vector hy = h * y;
  const double yhy = y.dot(hy);
  if (!(yhy > 0.0)) return;
  h.noalias() -= (hy * hy.transpose()) / yhy;
  h.noalias() += (s * s.transpose()) / s.dot(y);
}

Matrix bfgs_chain(const Matrix& dx, const Matrix& dg, double scale) {
  check_pair(dx, dg);
  check_scale(scale);
  Matrix h = Matrix::Identity(dx.rows(), dx.rows()) / scale;
  for (Index j = 0; j < dx.cols(); ++j) bfgs_update(h, dx.col(j), dg.col(j));
  return h;
}

Matrix dfp_chain(const Matrix& dx, const Matrix& dg, double scale) {
  check_pair(dx, dg);
  check_scale(scale);
  Matrix h = Matrix::Identity(dx.rows(), dx.rows()) / scale;
  for (Index j = 0; j < dx.cols(); ++j) dfp_update(h, dx.col(j), dg.col(j));
  return h;
}

InverseHessianEstimate semi_implicit_type2(const Matrix& dg, const ReferenceOperator& w,
                                           const ReferenceOperator& href) {
  const Index d = dg.rows();
  Matrix y = w.apply_inverse(dg);
  auto t = checked_lu(Matrix(dg.transpose() * y), "T1 = ΔGᵀW⁻¹ΔG");
  return {std::make_shared<SemiImplicit2Op>(dg, std::move(y), std::move(t), href), d, true};
}

InverseHessianEstimate semi_implicit_type1(const Matrix& dx, const ReferenceOperator& w,
                                           const ReferenceOperator& bref) {
  const Index d = dx.rows();
  const Matrix u = w.apply(dx);
  auto t = checked_lu(Matrix(dx.transpose() * u), "T2 = ΔXᵀWΔX");
  Matrix f = bref.apply_inverse(u);
  auto g = checked_lu(Matrix(u.transpose() * f), "UᵀB_ref⁻¹U");
  return {std::make_shared<SemiImplicit1Op>(dx, std::move(t), std::move(f), std::move(g), bref), d,
          true};
}

}  // namespace msqn
