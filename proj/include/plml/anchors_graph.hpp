#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "plml/types.hpp"

namespace plml {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// k-means anchors. Row l of `centers` is anchor u_l; assignment[i] is the
/// nearest anchor of training instance i.
struct AnchorModel {
  Matrix centers;
  std::vector<Index> assignment;

  Index size() const { return centers.rows(); }
};

/// Lloyd's algorithm from k-means++ seeding. Stops at an assignment fixpoint or
/// after `max_iter` rounds. `objective_trace`, when given, receives the
/// within-cluster sum of squares after every center update.
AnchorModel kmeans(const Matrix& X, Index m, std::uint64_t seed, int max_iter = 300,
                   std::vector<double>* objective_trace = nullptr);

/// Index of the anchor nearest to x (ties: lowest index).
Index nearest_anchor(const Matrix& centers, const VectorRef& x);

/// G(l, j) = ||u_l - x_j||^2, an m x n matrix.
Matrix build_anchor_distances(const Matrix& U, const Matrix& X);

enum class SimilarityKernel { SelfTuning, Binary };

struct LaplacianGraph {
  SparseMatrix S;
  SparseMatrix L;
  int knn_k = 6;
};

/// kNN similarity graph symmetrized by neighborhood union, and L = D - S.
/// SelfTuning: S_ij = exp(-d_ij^2 / (sigma_i sigma_j)), sigma_i the distance to
/// the knn_k-th neighbor. Binary: S_ij = 1 on every edge.
LaplacianGraph build_laplacian(const Matrix& X, int knn_k = 6,
                               SimilarityKernel kernel = SimilarityKernel::SelfTuning);

/// The `k` nearest other rows of X to row i under squared Euclidean distance,
/// nearest first (ties: lowest index).
std::vector<Index> nearest_rows(const Matrix& X, Index i, Index k);

}  // namespace plml
