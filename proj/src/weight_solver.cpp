#include "plml/weight_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "plml/error.hpp"

namespace plml {

void WeightProblem::validate() const {
  require(X.cols() == U.cols(), "weight problem: X and U differ in dimension");
  require(G.rows() == U.rows() && G.cols() == X.rows(), "weight problem: G must be m x n");
  require(L.rows() == X.rows() && L.cols() == X.rows(), "weight problem: L must be n x n");
  require(lambda1 >= 0.0 && lambda2 >= 0.0, "weight problem: lambdas must be nonnegative");
  require(U.rows() >= 1, "weight problem: need at least one anchor");
}

double weight_objective(const WeightProblem& prob, const Matrix& W) {
  const double fit = (prob.X - W * prob.U).squaredNorm();
  // tr(W G) = sum_ik W_ik G_ki
  const double locality = (W.array() * prob.G.transpose().array()).sum();
  const double smooth = (W.array() * (prob.L * W).array()).sum();
  return fit + prob.lambda1 * locality + prob.lambda2 * smooth;
}

Matrix weight_gradient(const WeightProblem& prob, const Matrix& W) {
  Matrix grad = 2.0 * (W * prob.U - prob.X) * prob.U.transpose();
  grad += prob.lambda1 * prob.G.transpose();
  grad += 2.0 * prob.lambda2 * (prob.L * W);
  return grad;
}

Vector project_simplex(const VectorRef& v) {
  const Index m = v.size();
  require(m >= 1, "project_simplex: empty vector");
  Vector sorted = v;
  std::sort(sorted.data(), sorted.data() + m, std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index k = 0; k < m; ++k) {
    cumsum += sorted(k);
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted(k) - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

Matrix project_simplex_rows(const Matrix& V) {
  Matrix out(V.rows(), V.cols());
  for (Index i = 0; i < V.rows(); ++i) out.row(i) = project_simplex(V.row(i).transpose()).transpose();
  return out;
}

WeightSolveResult solve_weights(const WeightProblem& prob, const WeightMatrix& W0, const FistaOptions& options,
                                const FistaObserver& observer) {
  prob.validate();
  require(W0.rows() == prob.n() && W0.cols() == prob.m(), "solve_weights: W0 must be n x m");

  SmoothProblem sp;
  sp.value = [&](const Matrix& W) { return weight_objective(prob, W); };
  sp.value_and_gradient = [&](const Matrix& W, Matrix& g) {
    g = weight_gradient(prob, W);
    return weight_objective(prob, W);
  };
  sp.project = [](const Matrix& V) { return project_simplex_rows(V); };

  FistaResult r = fista_minimize(sp, W0.matrix(), options, observer);
  WeightMatrix W(r.solution);
  return {std::move(W), std::move(r)};
}

std::pair<double, double> weighting_error_terms(const VectorRef& x, const VectorRef& weights, const Matrix& U,
                                                double p) {
  require(weights.size() == U.rows(), "weighting_error_terms: one weight per anchor required");
  require(x.size() == U.cols(), "weighting_error_terms: dimension mismatch");
  require(weights.minCoeff() >= 0.0, "weighting_error_terms: weights must be nonnegative");
  const Vector recon = U.transpose() * weights;
  const double linear = (x - recon).norm();
  double locality = 0.0;
  for (Index l = 0; l < U.rows(); ++l) {
    locality += weights(l) * std::pow((x - U.row(l).transpose()).norm(), 1.0 + p);
  }
  return {linear, locality};
}

Index nearest_training_row(const Matrix& train_X, const VectorRef& x) {
  if (train_X.rows() == 0) throw ContractError("nearest_training_row: empty training set");
  require(train_X.cols() == x.size(), "nearest_training_row: dimension mismatch");
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < train_X.rows(); ++i) {
    const double d = (train_X.row(i).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Vector assign_test_weights(const VectorRef& x, const Matrix& train_X, const WeightMatrix& W) {
  require(W.rows() == train_X.rows(), "assign_test_weights: W does not match the training set");
  return W.row(nearest_training_row(train_X, x));
}

}  // namespace plml
