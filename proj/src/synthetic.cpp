#include "plml/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "plml/error.hpp"

namespace plml {

Dataset make_blobs(const Matrix& centers, Index n_per_class, double stddev, std::uint64_t seed) {
  require(centers.rows() >= 1 && n_per_class >= 1, "make_blobs: need at least one center and one point");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, stddev);
  const Index c = centers.rows();
  Matrix X(c * n_per_class, centers.cols());
  std::vector<int> labels;
  labels.reserve(static_cast<size_t>(X.rows()));
  for (Index k = 0; k < c; ++k) {
    for (Index i = 0; i < n_per_class; ++i) {
      const Index r = k * n_per_class + i;
      for (Index j = 0; j < centers.cols(); ++j) X(r, j) = centers(k, j) + noise(rng);
      labels.push_back(static_cast<int>(k + 1));
    }
  }
  return Dataset::from_labels(std::move(X), labels);
}

Dataset make_rotating_bands(Index n, std::uint64_t seed) {
  require(n >= 3, "make_rotating_bands: need at least three points");
  constexpr double inner = 1.0;
  constexpr double outer = 4.0;
  constexpr double band = 0.5;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix X(n, 2);
  std::vector<int> labels;
  labels.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    // uniform in area over the annulus
    const double r = std::sqrt(inner * inner + unit(rng) * (outer * outer - inner * inner));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    X(i, 0) = r * std::cos(phi);
    X(i, 1) = r * std::sin(phi);
    const int b = static_cast<int>(std::floor((r - inner) / band));
    labels.push_back(b % 3);
  }
  return Dataset::from_labels(std::move(X), labels);
}

}  // namespace plml
