#pragma once

#include <optional>

#include "msqn/objectives.hpp"

namespace msqn {

enum class LineSearchKind { Unit, Dichotomy, Armijo };

struct LineSearchPolicy {
  LineSearchKind kind = LineSearchKind::Unit;
  int max_iters = 30;
  double bracket_growth = 2.0;
  /// Bisection stops once the bracket is narrower than tol·(1 + |h|).
  double tol = 1e-8;
  double c1 = 1e-4;
  double backtrack = 0.5;

  static LineSearchPolicy unit() { return {}; }
  static LineSearchPolicy dichotomy(int max_iters = 30, double growth = 2.0, double tol = 1e-8);
  static LineSearchPolicy armijo(double c1 = 1e-4, double backtrack = 0.5, int max_iters = 30);

  void validate() const;
};

struct StepResult {
  double h = 0.0;
  double f_new = 0.0;
  /// No step with f(x + h·d) ≤ f(x) was found; h is 0.
  bool no_decrease = false;
  int value_evals = 0;
  int gradient_evals = 0;
};

/// f0 is f(x); g0 (∇f(x)) is needed by the Armijo rule only.
StepResult line_search(const LineSearchPolicy& policy, const Objective& obj, const Vector& x,
                       const Vector& d, double f0, const std::optional<Vector>& g0 = std::nullopt);

}  // namespace msqn
