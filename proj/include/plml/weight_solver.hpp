#pragma once

#include <utility>

#include "plml/anchors_graph.hpp"
#include "plml/fista.hpp"
#include "plml/types.hpp"

namespace plml {

/// Smooth local linear weighting problem:
///   min_W ||X - W U||_F^2 + lambda1 tr(W G) + lambda2 tr(W^T L W),
/// every row of W on the simplex.
struct WeightProblem {
  Matrix X;  // n x d
  Matrix U;  // m x d
  Matrix G;  // m x n
  SparseMatrix L;  // n x n
  double lambda1 = 1.0;
  double lambda2 = 100.0;

  Index n() const { return X.rows(); }
  Index m() const { return U.rows(); }

  /// Throws ContractError on inconsistent shapes or negative lambdas.
  void validate() const;
};

double weight_objective(const WeightProblem& prob, const Matrix& W);

/// 2 (W U - X) U^T + lambda1 G^T + 2 lambda2 L W.
Matrix weight_gradient(const WeightProblem& prob, const Matrix& W);

/// Euclidean projection of one vector onto {w >= 0, sum w = 1}.
Vector project_simplex(const VectorRef& v);

/// Row-wise simplex projection.
Matrix project_simplex_rows(const Matrix& V);

struct WeightSolveResult {
  WeightMatrix W;
  FistaResult report;
};

WeightSolveResult solve_weights(const WeightProblem& prob, const WeightMatrix& W0,
                                const FistaOptions& options = {}, const FistaObserver& observer = {});

/// The two computable terms of the anchor approximation bound:
/// ||x - sum_u w_u u|| and sum_u w_u ||x - u||^(1+p).
std::pair<double, double> weighting_error_terms(const VectorRef& x, const VectorRef& weights,
                                                const Matrix& U, double p = 1.0);

/// Index of the training row nearest to x (ties: lowest index).
Index nearest_training_row(const Matrix& train_X, const VectorRef& x);

/// Weight row of the Euclidean-nearest training instance.
Vector assign_test_weights(const VectorRef& x, const Matrix& train_X, const WeightMatrix& W);

}  // namespace plml
