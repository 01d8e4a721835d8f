#pragma once

#include <cstdint>

#include "plml/types.hpp"

namespace plml {

/// Isotropic Gaussian blobs, n_per_class points around each row of `centers`.
Dataset make_blobs(const Matrix& centers, Index n_per_class, double stddev, std::uint64_t seed);

/// Three classes in concentric rings: the class of a point is its radial band
/// index modulo 3. Locally the only informative direction is the radial one,
/// which rotates with the polar angle.
Dataset make_rotating_bands(Index n = 600, std::uint64_t seed = 0);

}  // namespace plml
