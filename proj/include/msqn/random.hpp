#pragma once

#include <cstdint>
#include <random>

#include "msqn/types.hpp"

namespace msqn {

using Rng = std::mt19937_64;

Vector gaussian_vector(Rng& rng, Index n);
Matrix gaussian_matrix(Rng& rng, Index rows, Index cols);
/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
Matrix random_orthogonal(Rng& rng, Index n);
/// n×k with orthonormal columns.
Matrix random_orthonormal_columns(Rng& rng, Index n, Index k);

/// Independent stream seed for sub-task `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace msqn
