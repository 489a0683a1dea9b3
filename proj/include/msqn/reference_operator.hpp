#pragma once

#include <memory>
#include <optional>

#include "msqn/types.hpp"

namespace msqn {

/// Symmetric reference matrix (Z_ref, B_ref or H_ref) seen as an operator.
///
/// Two kinds exist: a scaled identity c·I, which costs O(d) per product and
/// is what the optimizers use, and a dense symmetric matrix intended for
/// tests. A dense input is replaced by its symmetric part on construction.
class ReferenceOperator {
 public:
  static ReferenceOperator scaled_identity(double c);
  static ReferenceOperator dense(const Matrix& m);

  bool is_scaled_identity() const { return dense_ == nullptr; }
  /// Scale c of a scaled identity; for a dense operator, the largest eigenvalue.
  double scale() const;
  /// Fixed dimension of a dense operator; scaled identities adapt to any d.
  std::optional<Index> dim() const;

  Vector apply(const Vector& v) const;
  Matrix apply(const Matrix& v) const;
  Vector apply_inverse(const Vector& v) const;
  Matrix apply_inverse(const Matrix& v) const;

  double min_eigenvalue() const;
  double max_eigenvalue() const;
  bool positive_definite() const { return min_eigenvalue() > 0.0; }

  /// Z_ref − σI.
  ReferenceOperator shifted(double sigma) const;

  Matrix materialize(Index d) const;

 private:
  struct DenseData;

  ReferenceOperator() = default;

  double scale_ = 1.0;
  std::shared_ptr<const DenseData> dense_;
};

}  // namespace msqn
