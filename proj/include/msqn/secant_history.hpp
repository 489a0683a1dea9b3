#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <utility>

#include "msqn/types.hpp"

namespace msqn {

/// Maps the (m+1) stored points to m secant columns: ΔX = X·C.
///
/// The default is the consecutive column-difference matrix (column j holds
/// x_{j+1} − x_j). An explicit C must have zero column sums and full column
/// rank; its row count has to match the number of stored entries when used.
class DifferenceOperator {
 public:
  static DifferenceOperator consecutive() { return DifferenceOperator{}; }
  static DifferenceOperator explicit_matrix(Matrix c);

  bool is_consecutive() const { return !c_.has_value(); }

  /// C materialized for `points` stored entries ((points)×(points−1) in
  /// consecutive mode).
  Matrix matrix(Index points) const;

 private:
  DifferenceOperator() = default;
  std::optional<Matrix> c_;
};

struct SecantDeltas {
  Matrix dx;
  Matrix dg;
};

/// Sliding window of (iterate, gradient) pairs. Keeps at most capacity + 1
/// points, so a full window yields `capacity` secant columns.
class SecantHistory {
 public:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max() - 1;

  SecantHistory(Index dimension, std::size_t capacity);

  /// Appends (x, g); evicts the oldest entry once more than capacity + 1 are held.
  void push(const Vector& x, const Vector& g);
  void clear() { xs_.clear(); gs_.clear(); }

  Index dimension() const { return dim_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return xs_.size(); }
  bool empty() const { return xs_.empty(); }

  const Vector& x(std::size_t i) const { return xs_[i]; }
  const Vector& g(std::size_t i) const { return gs_[i]; }
  const Vector& latest_x() const { return xs_.back(); }
  const Vector& latest_g() const { return gs_.back(); }

  /// X and G as d×(#entries) matrices, oldest first.
  Matrix iterates() const;
  Matrix gradients() const;

  SecantDeltas deltas() const;
  SecantDeltas deltas(const DifferenceOperator& diff) const;

  /// Affine combinations (X·v, G·v); v must sum to one.
  std::pair<Vector, Vector> combine(const Vector& v) const;

 private:
  Index dim_;
  std::size_t capacity_;
  std::deque<Vector> xs_;
  std::deque<Vector> gs_;
};

}  // namespace msqn
