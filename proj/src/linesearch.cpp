#include "msqn/linesearch.hpp"

#include <cmath>

#include "msqn/error.hpp"

namespace msqn {

LineSearchPolicy LineSearchPolicy::dichotomy(int max_iters, double growth, double tol) {
  LineSearchPolicy p;
  p.kind = LineSearchKind::Dichotomy;
  p.max_iters = max_iters;
  p.bracket_growth = growth;
  p.tol = tol;
  p.validate();
  return p;
}

LineSearchPolicy LineSearchPolicy::armijo(double c1, double backtrack, int max_iters) {
  LineSearchPolicy p;
  p.kind = LineSearchKind::Armijo;
  p.c1 = c1;
  p.backtrack = backtrack;
  p.max_iters = max_iters;
  p.validate();
  return p;
}

void LineSearchPolicy::validate() const {
  if (max_iters <= 0) throw InvalidArgument("line search: max_iters must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("line search: tol must be positive");
  if (!(bracket_growth > 1.0)) throw InvalidArgument("line search: bracket growth must exceed 1");
  if (!(c1 > 0.0 && c1 < 1.0)) throw InvalidArgument("line search: c1 must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw InvalidArgument("line search: backtrack must lie in (0, 1)");
  }
}

namespace {

struct Probe {
  const Objective& obj;
  const Vector& x;
  const Vector& d;
  StepResult& out;

  double value(double h) {
    ++out.value_evals;
    return obj.value(x + h * d);
  }
  double slope(double h) {
    ++out.gradient_evals;
    return obj.gradient(x + h * d).dot(d);
  }
};

StepResult dichotomy(const LineSearchPolicy& p, const Objective& obj, const Vector& x,
                     const Vector& d, double f0) {
  StepResult out;
  Probe probe{obj, x, d, out};

  // Largest trial step with a finite value, shrinking from 1.
  double h = 1.0;
  double fh = probe.value(h);
  int tries = 0;
  while (!std::isfinite(fh) && tries < p.max_iters) {
    h *= 0.5;
    fh = probe.value(h);
    ++tries;
  }
  if (!std::isfinite(fh)) {
    out.no_decrease = true;
    out.f_new = f0;
    return out;
  }

  double best_h = 0.0;
  double best_f = f0;
  if (fh < best_f) {
    best_h = h;
    best_f = fh;
  }

  double lo = 0.0;
  double hi = h;
  if (fh < f0) {
    // Grow while the value keeps decreasing.
    double prev = 0.0;
    for (int i = 0; i < p.max_iters; ++i) {
      const double next = h * p.bracket_growth;
      const double fn = probe.value(next);
      if (!(std::isfinite(fn) && fn < fh)) {
        lo = prev;
        hi = next;
        break;
      }
      prev = h;
      h = next;
      fh = fn;
      best_h = h;
      best_f = fh;
      lo = prev;
      hi = h;
    }
  }

  // Bisection on the sign of the directional derivative.
  for (int i = 0; i < p.max_iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < p.tol * (1.0 + std::abs(mid))) break;
    if (probe.slope(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double h_final = 0.5 * (lo + hi);
  const double f_final = probe.value(h_final);
  if (std::isfinite(f_final) && f_final <= best_f) {
    best_h = h_final;
    best_f = f_final;
  }
  if (best_h == 0.0) {
    out.no_decrease = true;
    out.f_new = f0;
    return out;
  }
  out.h = best_h;
  out.f_new = best_f;
  return out;
}

StepResult armijo(const LineSearchPolicy& p, const Objective& obj, const Vector& x,
                  const Vector& d, double f0, const Vector& g0) {
  StepResult out;
  Probe probe{obj, x, d, out};
  const double slope = g0.dot(d);
  double h = 1.0;
  for (int i = 0; i < p.max_iters; ++i) {
    const double fh = probe.value(h);
    if (std::isfinite(fh) && fh <= f0 + p.c1 * h * slope && fh <= f0) {
      out.h = h;
      out.f_new = fh;
      return out;
    }
    h *= p.backtrack;
  }
  out.no_decrease = true;
  out.f_new = f0;
  return out;
}

}  // namespace

StepResult line_search(const LineSearchPolicy& policy, const Objective& obj, const Vector& x,
                       const Vector& d, double f0, const std::optional<Vector>& g0) {
  if (x.size() != obj.dim() || d.size() != obj.dim()) {
    throw DimensionMismatch("line search: point or direction has wrong length");
  }
  if (!d.allFinite()) throw InvalidArgument("line search: direction is not finite");
  switch (policy.kind) {
    case LineSearchKind::Unit: {
      StepResult out;
      out.h = 1.0;
      out.f_new = obj.value(x + d);
      out.value_evals = 1;
      return out;
    }
    case LineSearchKind::Dichotomy:
      policy.validate();
      return dichotomy(policy, obj, x, d, f0);
    case LineSearchKind::Armijo:
      policy.validate();
      if (!g0) throw InvalidArgument("Armijo line search needs the gradient at x");
      return armijo(policy, obj, x, d, f0, *g0);
  }
  throw InvalidArgument("unknown line search kind");
}

}  // namespace msqn
