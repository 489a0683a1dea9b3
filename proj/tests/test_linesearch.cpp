#include <cmath>
#include <functional>

#include "doctest.h"
#include "msqn/error.hpp"
#include "msqn/linesearch.hpp"
#include "msqn/objectives.hpp"
#include "test_util.hpp"

using namespace msqn;

namespace {

double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  for (int i = 0; i < 200; ++i) {
    const double c = b - r * (b - a);
    const double d = a + r * (b - a);
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("dichotomy finds the 1-d quadratic minimizer") {
  const QuadraticObjective q(Matrix::Identity(1, 1), Vector::Constant(1, 3.0));
  const Vector x = Vector::Zero(1);
  const StepResult s =
      line_search(LineSearchPolicy::dichotomy(), q, x, Vector::Ones(1), q.value(x));
  CHECK(s.h == doctest::Approx(3.0).epsilon(1e-7));
  CHECK_FALSE(s.no_decrease);
}

TEST_CASE("unit policy always returns one") {
  const QuadraticObjective q = synthetic_quadratic(4, 10.0, 0);
  const Vector x = Vector::Ones(4);
  const Vector d = q.gradient(x);
  const StepResult s = line_search(LineSearchPolicy::unit(), q, x, d, q.value(x));
  CHECK(s.h == 1.0);
  CHECK(s.f_new == doctest::Approx(q.value(x + d)));
}

TEST_CASE("descent directions decrease f") {
  Rng rng(1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const QuadraticObjective q = synthetic_quadratic(8, 100.0, seed);
    const Vector x = gaussian_vector(rng, 8);
    const Vector g = q.gradient(x);
    const Vector w = gaussian_vector(rng, 8).cwiseAbs();
    const Vector d = -(w.asDiagonal() * g);
    for (const LineSearchPolicy& p : {LineSearchPolicy::dichotomy(), LineSearchPolicy::armijo()}) {
      const StepResult s = line_search(p, q, x, d, q.value(x), g);
      CHECK_FALSE(s.no_decrease);
      CHECK(q.value(x + s.h * d) <= q.value(x) - 1e-12);
      CHECK(s.f_new == doctest::Approx(q.value(x + s.h * d)));
    }
  }
}

TEST_CASE("dichotomy agrees with golden section on convex restrictions") {
  Rng rng(2);
  const QuadraticObjective q = synthetic_quadratic(6, 50.0, 3);
  const RegressionObjective r = synthetic_regression(80, 6, 10.0, Loss::Logistic, 0.01, 4);
  for (const Objective* obj : {static_cast<const Objective*>(&q), static_cast<const Objective*>(&r)}) {
    for (int i = 0; i < 5; ++i) {
      const Vector x = gaussian_vector(rng, 6);
      const Vector d = -obj->gradient(x) * (0.2 + i);
      auto phi = [&](double h) { return obj->value(x + h * d); };
      const double h_star = golden_section(phi, 0.0, 1e4);
      const StepResult s =
          line_search(LineSearchPolicy::dichotomy(60, 2.0, 1e-10), *obj, x, d, obj->value(x));
      CHECK(std::abs(s.h - h_star) <= 1e-5 * (1.0 + h_star));
    }
  }
}

TEST_CASE("ascent direction reports no decrease") {
  const QuadraticObjective q = synthetic_quadratic(3, 5.0, 1);
  const Vector x = Vector::Ones(3);
  const Vector d = q.gradient(x);
  const StepResult s = line_search(LineSearchPolicy::dichotomy(), q, x, d, q.value(x));
  CHECK(s.no_decrease);
  CHECK(s.h == 0.0);
  CHECK(s.f_new == q.value(x));
}

TEST_CASE("policy validation") {
  CHECK_THROWS_AS(LineSearchPolicy::dichotomy(0).validate(), InvalidArgument);
  CHECK_THROWS_AS(LineSearchPolicy::dichotomy(30, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(LineSearchPolicy::armijo(1.5).validate(), InvalidArgument);
  CHECK_THROWS_AS(LineSearchPolicy::armijo(1e-4, 1.0).validate(), InvalidArgument);
  const QuadraticObjective q = synthetic_quadratic(2, 2.0, 0);
  CHECK_THROWS_AS(line_search(LineSearchPolicy::armijo(), q, Vector::Ones(2), -Vector::Ones(2), 1.0),
                  InvalidArgument);
}
