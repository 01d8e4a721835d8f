#pragma once

#include <string>
#include <vector>

#include "plml/anchors_graph.hpp"
#include "plml/preprocess.hpp"
#include "plml/types.hpp"

namespace plml {

enum class Variant { PLML, SML, CBLML };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

struct Hyperparams {
  double lambda1 = 1.0;
  double lambda2 = 100.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  Index m = 20;
  int k1 = 3;
  int k2 = 3;
  int knn_k = 6;
};

/// A trained local-metric 1-NN classifier. Training instances are stored
/// preprocessed; W holds one simplex row per training instance.
struct PlmlModel {
  PreprocessModel preprocess;
  AnchorModel anchors;
  BasisMetrics basis;
  WeightMatrix W;
  Matrix train_X;
  std::vector<int> train_y;
  std::vector<std::string> class_names;
  Variant variant = Variant::PLML;
  Hyperparams hyper;

  /// Throws DataError naming the first violated invariant.
  void validate() const;
};

enum class DistancePath {
  Auto,           // combined matrix when m > 1
  WeightedSum,    // sum_l w_l d^2_{M_l}
  CombinedMatrix  // d^2 under sum_l w_l M_l
};

/// Basis weights of a preprocessed query under the model's variant.
Vector query_weights(const PlmlModel& model, const VectorRef& x_pre);

/// Squared distances from a preprocessed query to every training row under
/// the metric sum_l w_l M_l.
Vector query_distances(const PlmlModel& model, const VectorRef& x_pre, const VectorRef& w,
                       DistancePath path = DistancePath::Auto);

/// Label of the training instance nearest to a preprocessed query under the
/// query's own metric (ties: lowest index).
int predict_preprocessed(const PlmlModel& model, const VectorRef& x_pre, DistancePath path = DistancePath::Auto);

int predict(const PlmlModel& model, const VectorRef& x_raw, DistancePath path = DistancePath::Auto);

/// Same as calling predict per row; `threads` > 1 splits rows across workers.
std::vector<int> predict_batch(const PlmlModel& model, const Matrix& X_raw, int threads = 1,
                               DistancePath path = DistancePath::Auto);

std::vector<int> predict_batch_preprocessed(const PlmlModel& model, const Matrix& X_pre, int threads = 1,
                                            DistancePath path = DistancePath::Auto);

/// Each training instance classified by its nearest other training instance
/// under its own local metric.
double leave_one_out_accuracy(const PlmlModel& model, DistancePath path = DistancePath::Auto);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Plain Euclidean 1-NN on already-preprocessed data.
std::vector<int> euclidean_1nn(const Matrix& train_X, const std::vector<int>& train_y, const Matrix& queries);

}  // namespace plml
