#include "doctest.h"
#include "msqn/error.hpp"
#include "msqn/secant_history.hpp"
#include "test_util.hpp"

using namespace msqn;

TEST_CASE("empty history yields zero-column deltas") {
  SecantHistory h(2, 3);
  h.push(Vector::Zero(2), Vector::Ones(2));
  CHECK(h.size() == 1);
  const SecantDeltas d = h.deltas();
  CHECK(d.dx.cols() == 0);
  CHECK(d.dg.cols() == 0);
  CHECK(d.dx.rows() == 2);
}

TEST_CASE("eviction keeps capacity plus one points") {
  SecantHistory h(1, 2);
  for (int i = 0; i < 4; ++i) h.push(Vector::Constant(1, i), Vector::Constant(1, -i));
  CHECK(h.size() == 3);
  CHECK(h.x(0)(0) == 1.0);
  CHECK(h.deltas().dx.cols() == 2);
}

TEST_CASE("column count is min(pushes, capacity + 1) - 1") {
  for (std::size_t cap : {1u, 3u, 5u}) {
    SecantHistory h(3, cap);
    for (std::size_t n = 1; n <= 8; ++n) {
      h.push(Vector::Random(3), Vector::Random(3));
      CHECK(static_cast<std::size_t>(h.deltas().dx.cols()) == std::min(n, cap + 1) - 1);
    }
  }
}

TEST_CASE("push rejects wrong dimension") {
  SecantHistory h(2, 3);
  CHECK_THROWS_AS(h.push(Vector::Zero(3), Vector::Zero(3)), DimensionMismatch);
  CHECK_THROWS_AS(h.push(Vector::Zero(2), Vector::Zero(1)), DimensionMismatch);
}

TEST_CASE("single difference") {
  SecantHistory h(2, 4);
  h.push(Vector::Zero(2), (Vector(2) << 1, 0).finished());
  h.push((Vector(2) << 1, 2).finished(), (Vector(2) << 0, 1).finished());
  const SecantDeltas d = h.deltas();
  CHECK(d.dx(0, 0) == 1.0);
  CHECK(d.dx(1, 0) == 2.0);
  CHECK(d.dg(0, 0) == -1.0);
  CHECK(d.dg(1, 0) == 1.0);
}

TEST_CASE("explicit difference matrix matches consecutive mode and X*C") {
  Rng rng(3);
  SecantHistory h(4, 10);
  for (int i = 0; i < 5; ++i) h.push(gaussian_vector(rng, 4), gaussian_vector(rng, 4));
  Matrix c = Matrix::Zero(5, 4);
  for (Index j = 0; j < 4; ++j) {
    c(j, j) = -1.0;
    c(j + 1, j) = 1.0;
  }
  const SecantDeltas a = h.deltas();
  const SecantDeltas b = h.deltas(DifferenceOperator::explicit_matrix(c));
  CHECK((a.dx - b.dx).norm() == 0.0);
  CHECK((a.dg - b.dg).norm() == 0.0);
  CHECK((h.iterates() * c - a.dx).norm() == 0.0);

  Matrix wrong = Matrix::Zero(4, 3);
  for (Index j = 0; j < 3; ++j) {
    wrong(j, j) = -1.0;
    wrong(j + 1, j) = 1.0;
  }
  CHECK_THROWS_AS(h.deltas(DifferenceOperator::explicit_matrix(wrong)), DimensionMismatch);
}

TEST_CASE("explicit difference matrix must have zero column sums and full rank") {
  Matrix bad = Matrix::Zero(3, 2);
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(DifferenceOperator::explicit_matrix(bad), InvalidArgument);
  Matrix rank1(3, 2);
  rank1 << -1, -2, 1, 2, 0, 0;
  CHECK_THROWS_AS(DifferenceOperator::explicit_matrix(rank1), InvalidArgument);
}

TEST_CASE("combine") {
  Rng rng(5);
  SecantHistory h(3, 10);
  for (int i = 0; i < 4; ++i) h.push(gaussian_vector(rng, 3), gaussian_vector(rng, 3));

  Vector last = Vector::Zero(4);
  last(3) = 1.0;
  auto [xl, gl] = h.combine(last);
  CHECK((xl - h.latest_x()).norm() == 0.0);
  CHECK((gl - h.latest_g()).norm() == 0.0);

  auto [xm, gm] = h.combine(Vector::Constant(4, 0.25));
  CHECK((xm - h.iterates().rowwise().mean()).norm() < 1e-14);
  CHECK((gm - h.gradients().rowwise().mean()).norm() < 1e-14);

  Vector v = gaussian_vector(rng, 4);
  v(3) = 1.0 - v.head(3).sum();
  auto [xv, gv] = h.combine(v);
  CHECK((xv - h.iterates() * v).norm() < 1e-14);
  CHECK((gv - h.gradients() * v).norm() < 1e-14);

  CHECK_THROWS_AS(h.combine(Vector::Constant(4, 0.3)), InvalidArgument);
  CHECK_THROWS_AS(h.combine(Vector::Constant(3, 1.0 / 3.0)), DimensionMismatch);
}
