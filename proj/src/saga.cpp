#include "msqn/saga.hpp"

#include <numeric>
#include <string>

#include "msqn/error.hpp"

namespace msqn {

SagaState::SagaState(const RegressionObjective& obj, const Vector& x0, Index batch_size,
                     std::uint64_t seed)
    : batch_size_(batch_size), rng_(seed) {
  if (batch_size_ <= 0) throw InvalidArgument("SAGA batch size must be positive");
  check(obj, x0);
  const Index n = obj.samples();
  table_.resize(n);
  for (Index i = 0; i < n; ++i) table_(i) = obj.sample_derivative(i, x0);
  mean_ = recomputed_mean(obj);
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), Index{0});
}

void SagaState::check(const RegressionObjective& obj, const Vector& x) const {
  if (x.size() != obj.dim()) throw DimensionMismatch("SAGA: point has wrong length");
  if (table_.size() != 0 && table_.size() != obj.samples()) {
    throw DimensionMismatch("SAGA: state built for another objective");
  }
}

std::vector<Index> SagaState::draw_batch() {
  const std::size_t n = order_.size();
  const std::size_t k = std::min(n, static_cast<std::size_t>(batch_size_));
  // Partial Fisher–Yates over a persistent permutation.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order_[i], order_[pick(rng_)]);
  }
  return {order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(k)};
}

Vector SagaState::estimate(const RegressionObjective& obj, const Vector& x,
                           const std::vector<Index>& batch) const {
  check(obj, x);
  if (batch.empty()) throw InvalidArgument("SAGA: empty batch");
  Vector g = Vector::Zero(obj.dim());
  for (Index i : batch) {
    g += (obj.sample_derivative(i, x) - table_(i)) * obj.data().row(i).transpose();
  }
  g /= static_cast<double>(batch.size());
  return g + mean_ + obj.tau() * x;
}

Vector SagaState::next(const RegressionObjective& obj, const Vector& x) {
  const std::vector<Index> batch = draw_batch();
  check(obj, x);
  const double n = static_cast<double>(obj.samples());
  Vector diff = Vector::Zero(obj.dim());
  for (Index i : batch) {
    const double fresh = obj.sample_derivative(i, x);
    diff += (fresh - table_(i)) * obj.data().row(i).transpose();
    table_(i) = fresh;
  }
  const Vector g = diff / static_cast<double>(batch.size()) + mean_ + obj.tau() * x;
  mean_ += diff / n;
  updates_since_refresh_ += batch.size();
  if (updates_since_refresh_ >= static_cast<std::size_t>(obj.samples())) {
    mean_ = recomputed_mean(obj);
    updates_since_refresh_ = 0;
  }
  return g;
}

Vector SagaState::recomputed_mean(const RegressionObjective& obj) const {
  return obj.data().transpose() * table_ / static_cast<double>(obj.samples());
}

}  // namespace msqn
