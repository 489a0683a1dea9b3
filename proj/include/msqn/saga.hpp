#pragma once

#include <cstdint>
#include <vector>

#include "msqn/objectives.hpp"
#include "msqn/random.hpp"

namespace msqn {

/// SAGA gradient estimator for linear-model objectives. The per-sample
/// gradient is ℓ′(aᵢᵀx, bᵢ)·aᵢ, so the table stores one scalar per sample and
/// the table mean is Aᵀ·table / N.
class SagaState {
 public:
  /// Table filled at x0 (not counted as gradient evaluations).
  SagaState(const RegressionObjective& obj, const Vector& x0, Index batch_size, std::uint64_t seed);

  Index batch_size() const { return batch_size_; }
  const Vector& table() const { return table_; }
  const Vector& table_mean() const { return mean_; }

  /// Uniform sample of batch_size distinct indices (all samples when the
  /// batch is at least N).
  std::vector<Index> draw_batch();

  /// (1/|B|)·Σ_{i∈B}(∇fᵢ(x) − table[i]) + table_mean + τx. Leaves the state alone.
  Vector estimate(const RegressionObjective& obj, const Vector& x,
                  const std::vector<Index>& batch) const;

  /// Draws a batch, returns the estimate at x, then stores the fresh
  /// per-sample gradients for that batch.
  Vector next(const RegressionObjective& obj, const Vector& x);

  /// Mean recomputed from scratch, for checking the incremental update.
  Vector recomputed_mean(const RegressionObjective& obj) const;

 private:
  void check(const RegressionObjective& obj, const Vector& x) const;

  Index batch_size_;
  Rng rng_;
  Vector table_;
  Vector mean_;
  std::vector<Index> order_;
  std::size_t updates_since_refresh_ = 0;
};

}  // namespace msqn
