#pragma once

#include <cstdint>
#include <vector>

#include "plml/fista.hpp"
#include "plml/triplets.hpp"
#include "plml/types.hpp"

namespace plml {

/// Large-margin basis metric learning, solved in the reduced dual over the
/// box-constrained triplet multipliers gamma.
struct MetricProblem {
  Matrix X;  // preprocessed training instances
  WeightMatrix W;
  TripletSet triplets;
  double alpha1 = 1.0;
  double alpha2 = 1.0;

  void validate() const;
};

/// Eigen-split of a symmetric matrix: K = positive - negative_part, with both
/// parts PSD and orthogonal.
struct PsdSplit {
  Matrix positive;  // (K)_+
  Matrix residual;  // (K)_+ - K, i.e. the magnitude of the negative part
  double residual_sq_norm = 0.0;
};

/// Symmetrizes K and zeroes its negative eigenvalues.
Matrix psd_project(const Matrix& K);

PsdSplit psd_split(const Matrix& K);

/// Number of symmetric eigendecompositions performed by psd_split so far.
std::uint64_t eigendecomposition_count();

/// Elementwise clamp to [0, 1].
Vector box_project(const VectorRef& v);

/// Precomputed geometry of a metric problem. Distinct (i, j) and (i, k) pairs
/// of the triplet set are stored once so K_l costs one weighted Gram product.
class DualModel {
 public:
  explicit DualModel(const MetricProblem& problem);

  Index num_triplets() const { return static_cast<Index>(triplets_.size()); }
  Index num_bases() const { return W_.cols(); }

  /// K_l = P_l - sum_t gamma_t W_{i(t) l} C_t for every basis l.
  std::vector<Matrix> assemble_K(const VectorRef& gamma) const;

  /// -sum gamma + sum_l ||(K_l)_+ - K_l||_F^2 / (4 alpha1).
  double objective(const VectorRef& gamma) const;

  /// Objective plus its gradient
  /// -1 + sum_l <(K_l)_+ - K_l, W_{i l} C_t> / (2 alpha1).
  double objective_and_gradient(const VectorRef& gamma, Vector& grad) const;

  /// M_l = ((K_l)_+ - K_l) / (2 alpha1).
  BasisMetrics recover_metrics(const VectorRef& gamma) const;

  const std::vector<Matrix>& pull_matrices() const { return pull_; }

 private:
  Matrix weighted_gram(const Vector& coeff) const;

  Matrix W_;
  double alpha1_;
  Matrix pair_diffs_;               // one row per distinct pair, x_i - x_j
  std::vector<Index> pair_owner_;   // i of each pair
  struct TripletPairs {
    Index owner;
    Index near;  // pair index of (i, j)
    Index far;   // pair index of (i, k)
  };
  std::vector<TripletPairs> triplets_;
  std::vector<Matrix> pull_;  // P_l
};

std::vector<Matrix> assemble_K(const MetricProblem& prob, const VectorRef& gamma);
double dual_objective(const MetricProblem& prob, const VectorRef& gamma);
Vector dual_gradient(const MetricProblem& prob, const VectorRef& gamma);

struct MetricSolveResult {
  BasisMetrics basis;
  Vector gamma;
  FistaResult report;
  bool converged = false;  // false: best iterate returned after the iteration cap
};

/// FISTA on the reduced dual from gamma = 0, then recovers the basis metrics.
MetricSolveResult solve_basis_metrics(const MetricProblem& prob, const FistaOptions& options = {},
                                      const FistaObserver& observer = {});

}  // namespace plml
