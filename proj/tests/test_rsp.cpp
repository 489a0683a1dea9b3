#include "doctest.h"
#include "msqn/error.hpp"
#include "msqn/reference_operator.hpp"
#include "msqn/rsp.hpp"
#include "test_util.hpp"

using namespace msqn;
using testutil::rel;

namespace {

// Symmetric part of the objective gradient: (ZA − D)Aᵀ + A(ZA − D)ᵀ + λ(Z − Zref).
Matrix stationarity(const Matrix& z, const RspProblem& p) {
  const Matrix r = (z * p.a - p.d) * p.a.transpose();
  return r + r.transpose() + p.lambda * (z - p.zref.materialize(z.rows()));
}

double objective(const Matrix& z, const RspProblem& p) {
  return (z * p.a - p.d).squaredNorm() + 0.5 * p.lambda * (z - p.zref.materialize(z.rows())).squaredNorm();
}

RspProblem random_problem(Rng& rng, Index d, Index m, double lambda, bool dense) {
  RspProblem p;
  p.a = gaussian_matrix(rng, d, m);
  p.d = gaussian_matrix(rng, d, m);
  p.lambda = lambda;
  p.zref = dense ? ReferenceOperator::dense(testutil::spd(rng, d, 10.0))
                 : ReferenceOperator::scaled_identity(1.5);
  return p;
}

}  // namespace

TEST_CASE("reference operator is symmetric and invertible") {
  Rng rng(1);
  Matrix m = gaussian_matrix(rng, 6, 6);
  m += 8.0 * Matrix::Identity(6, 6);
  const ReferenceOperator dense = ReferenceOperator::dense(m);
  const Vector v = gaussian_vector(rng, 6);
  const Vector w = gaussian_vector(rng, 6);
  CHECK(std::abs(v.dot(dense.apply(w)) - w.dot(dense.apply(v))) < 1e-12);
  CHECK((dense.apply(dense.apply_inverse(v)) - v).norm() < 1e-10);
  CHECK(rel(dense.materialize(6), 0.5 * (m + m.transpose())) < 1e-15);

  const ReferenceOperator c = ReferenceOperator::scaled_identity(3.0);
  CHECK((c.apply_inverse(v) - v / 3.0).norm() < 1e-15);
  CHECK(c.shifted(1.0).scale() == doctest::Approx(2.0));
  CHECK_THROWS_AS(ReferenceOperator::scaled_identity(0.0), InvalidArgument);
  CHECK_THROWS_AS(ReferenceOperator::dense(Matrix::Zero(3, 3)), InvalidArgument);
}

TEST_CASE("identity secant with identity reference") {
  RspProblem p;
  p.a = Matrix::Zero(2, 1);
  p.a(0, 0) = 1.0;
  p.d = p.a;
  p.zref = ReferenceOperator::scaled_identity(1.0);
  const RspFactors f = factorize(p);
  CHECK(f.rank() == 1);
  CHECK(f.z1()(0, 0) == doctest::Approx(1.0));
  CHECK(f.z2().norm() < 1e-15);
  CHECK((f.materialize() - Matrix::Identity(2, 2)).norm() < 1e-15);
  const Vector v = (Vector(2) << 0.3, -2.0).finished();
  CHECK((f.apply(v) - v).norm() < 1e-15);
  CHECK((f.apply_inverse(v) - v).norm() < 1e-15);
}

TEST_CASE("huge lambda collapses to the reference") {
  Rng rng(2);
  RspProblem p = random_problem(rng, 7, 3, 1e12, false);
  p.zref = ReferenceOperator::scaled_identity(2.0);
  const RspFactors f = factorize(p);
  for (int i = 0; i < 5; ++i) {
    const Vector v = gaussian_vector(rng, 7);
    CHECK((f.apply(v) - 2.0 * v).norm() <= 1e-6 * v.norm());
  }
  CHECK((brute_force_oracle(p) - 2.0 * Matrix::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("closed form is stationary for the regularized objective") {
  Rng rng(3);
  for (int i = 0; i < 30; ++i) {
    const Index d = 3 + i % 9;
    const Index m = 1 + i % std::min<Index>(d, 5);
    const RspProblem p = random_problem(rng, d, m, i % 2 == 0 ? 0.1 : 3.0, i % 3 == 0);
    const Matrix z = factorize(p).materialize();
    CHECK(testutil::asym(z) < 1e-14);
    CHECK(stationarity(z, p).norm() <= 1e-10 * (1.0 + z.norm()));
  }
}

TEST_CASE("random instance matches the brute-force oracle") {
  Rng rng(4);
  const RspProblem p = random_problem(rng, 8, 3, 0.1, true);
  CHECK(rel(factorize(p).materialize(), brute_force_oracle(p)) <= 1e-10);
}

TEST_CASE("brute-force oracle: consistent system and local optimality") {
  Rng rng(5);
  RspProblem p;
  p.a = gaussian_matrix(rng, 6, 2);
  p.d = p.a;
  p.zref = ReferenceOperator::scaled_identity(1.0);
  const Matrix z = brute_force_oracle(p);
  CHECK((z * p.a - p.a).norm() <= 1e-10);

  RspProblem q = random_problem(rng, 6, 2, 0.3, false);
  const Matrix zq = brute_force_oracle(q);
  const double best = objective(zq, q);
  for (int i = 0; i < 20; ++i) {
    Matrix e = gaussian_matrix(rng, 6, 6);
    e = (0.5 * (e + e.transpose())).eval();
    e *= 1e-3 / e.norm();
    CHECK(objective(zq + e, q) >= best - 1e-9);
  }
  RspProblem big = random_problem(rng, 41, 1, 0.1, false);
  CHECK_THROWS_AS(brute_force_oracle(big), InvalidArgument);
}

TEST_CASE("factor invariants") {
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Index d = 5 + i;
    const Index m = 1 + i % 5;
    const RspProblem p = random_problem(rng, d, m, i % 2 == 0 ? 0.0 : 0.01, false);
    const RspFactors f = factorize(p);
    CHECK((f.v1().transpose() * f.v1() - Matrix::Identity(f.rank(), f.rank())).norm() < 1e-12);
    CHECK((f.z1() - f.z1().transpose()).norm() < 1e-12);
    CHECK((f.z2() * f.v1()).norm() < 1e-10);
    const Vector v = gaussian_vector(rng, d);
    const Vector w = gaussian_vector(rng, d);
    CHECK(std::abs(v.dot(f.apply(w)) - w.dot(f.apply(v))) <= 1e-12 * (1.0 + f.materialize().norm()) * v.norm() * w.norm());
    CHECK((f.apply(v) - f.materialize() * v).norm() <= 1e-12 * (1.0 + f.materialize().norm()) * v.norm());
  }
}

TEST_CASE("exact symmetric solution is recovered at lambda zero") {
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    const Matrix q = testutil::spd(rng, 12, 20.0);
    RspProblem p;
    p.a = gaussian_matrix(rng, 12, 1 + i % 6);
    p.d = q * p.a;
    const RspFactors f = factorize(p);
    CHECK((f.apply(Matrix(p.a)) - p.d).norm() <= 1e-8 * p.d.norm());
  }
}

TEST_CASE("rank deficiency and shape errors") {
  Rng rng(8);
  RspProblem p;
  p.a = gaussian_matrix(rng, 5, 2);
  p.a.col(1) = 2.0 * p.a.col(0);
  p.d = gaussian_matrix(rng, 5, 2);
  CHECK_THROWS_AS(factorize(p), RankDeficient);
  p.lambda = 1e-3;
  CHECK_NOTHROW(factorize(p));

  RspProblem bad;
  bad.a = gaussian_matrix(rng, 5, 2);
  bad.d = gaussian_matrix(rng, 5, 3);
  CHECK_THROWS_AS(factorize(bad), DimensionMismatch);
  bad.d = gaussian_matrix(rng, 3, 6);
  bad.a = gaussian_matrix(rng, 3, 6);
  CHECK_THROWS_AS(factorize(bad), DimensionMismatch);
  bad.a = gaussian_matrix(rng, 5, 2);
  bad.d = gaussian_matrix(rng, 5, 2);
  bad.lambda = -1.0;
  CHECK_THROWS_AS(factorize(bad), InvalidArgument);
  const RspFactors f = factorize(random_problem(rng, 5, 2, 0.1, false));
  CHECK_THROWS_AS(f.apply(Vector(Vector::Zero(4))), DimensionMismatch);
}

TEST_CASE("inverse round trip and dense inverse") {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const Index d = 4 + 3 * i;
    const Matrix q = testutil::spd(rng, d, 10.0);
    const Matrix a = gaussian_matrix(rng, d, 1 + i % 6);
    const ReferenceOperator zref = i % 2 == 0 ? ReferenceOperator::scaled_identity(0.7)
                                              : ReferenceOperator::dense(testutil::spd(rng, d, 4.0));
    const RspFactors f = factorize_relative(a, q * a, i % 3 == 0 ? 0.0 : 1e-2, zref);
    REQUIRE(f.invertible());
    const Vector v = gaussian_vector(rng, d);
    CHECK((f.apply(f.apply_inverse(v)) - v).norm() <= 1e-8 * v.norm());
    if (d <= 12) CHECK(rel(f.materialize_inverse(), f.materialize().inverse()) <= 1e-8);
  }
}

TEST_CASE("singular core is reported") {
  RspProblem p;
  p.a = Matrix::Zero(3, 1);
  p.a(0, 0) = 1.0;
  p.d = Matrix::Zero(3, 1);
  p.zref = ReferenceOperator::scaled_identity(1.0);
  const RspFactors f = factorize(p);
  CHECK_FALSE(f.invertible());
  CHECK_THROWS_AS(f.apply_inverse(Vector(Vector::Ones(3))), SingularCore);
}

TEST_CASE("relative lambda uses the squared spectral norm") {
  Rng rng(10);
  const Matrix a = 3.0 * gaussian_matrix(rng, 6, 2);
  const Matrix d = gaussian_matrix(rng, 6, 2);
  const ReferenceOperator zref = ReferenceOperator::scaled_identity(1.0);
  const double smax = Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
  const RspFactors f = factorize_relative(a, d, 0.05, zref);
  CHECK(f.lambda() == doctest::Approx(0.05 * smax * smax));
  CHECK(rel(f.materialize(), factorize({a, d, 0.05 * smax * smax, zref}).materialize()) < 1e-12);
}

TEST_CASE("PSD projection") {
  Rng rng(11);
  SUBCASE("inactive clamp leaves the factors alone") {
    const Matrix q = testutil::spd(rng, 8, 3.0);
    const Matrix a = gaussian_matrix(rng, 8, 3);
    const RspFactors f = factorize({a, q * a, 0.0, ReferenceOperator::scaled_identity(0.8)});
    REQUIRE(testutil::min_eig(f.materialize()) > 0.1);
    const RspFactors g = psd_project(f, 0.0);
    CHECK((g.z1() - f.z1()).norm() <= 1e-12);
  }
  SUBCASE("indefinite data, zero floor") {
    for (int i = 0; i < 10; ++i) {
      const RspFactors f = factorize(random_problem(rng, 10, 3, 0.0, i % 2 == 0));
      CHECK(testutil::min_eig(psd_project(f, 0.0).materialize()) >= -1e-10);
    }
  }
  SUBCASE("floor 0.1 with identity reference") {
    for (int i = 0; i < 10; ++i) {
      RspProblem p = random_problem(rng, 9, 1 + i % 4, 0.01, false);
      p.zref = ReferenceOperator::scaled_identity(1.0);
      const RspFactors f = psd_project(factorize(p), 0.1);
      CHECK(testutil::min_eig(f.materialize()) >= 0.1 - 1e-10);
    }
  }
  SUBCASE("floor must stay below the reference spectrum") {
    const RspFactors f = factorize(random_problem(rng, 5, 2, 0.0, false));
    CHECK_THROWS_AS(psd_project(f, 2.0), NotPositiveDefinite);
    RspProblem p = random_problem(rng, 5, 2, 0.0, false);
    p.zref = ReferenceOperator::scaled_identity(-1.0);
    CHECK_THROWS_AS(psd_project(factorize(p), 0.0), NotPositiveDefinite);
  }
}

TEST_CASE("bias bound") {
  Rng rng(12);
  RspProblem p = random_problem(rng, 7, 3, 0.0, false);
  const RspFactors zero = factorize(p);
  const BiasBound trivial = bias_bound(zero, zero);
  CHECK(trivial.measured == 0.0);
  CHECK(trivial.bound == 0.0);
  p.lambda = 1e-3;
  const BiasBound b = bias_bound(factorize(p), zero);
  CHECK(b.measured > 0.0);
  CHECK(b.measured <= b.bound);
}
