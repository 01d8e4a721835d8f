#include "plml/predictor.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <thread>

#include "plml/error.hpp"
#include "plml/weight_solver.hpp"

namespace plml {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::PLML: return "PLML";
    case Variant::SML: return "SML";
    case Variant::CBLML: return "CBLML";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "PLML") return Variant::PLML;
  if (up == "SML") return Variant::SML;
  if (up == "CBLML") return Variant::CBLML;
  throw ContractError("unknown variant '" + name + "' (expected PLML, SML or CBLML)");
}

void PlmlModel::validate() const {
  const Index n = train_X.rows();
  const Index d = train_X.cols();
  const Index m = basis.size();
  if (n < 1) throw DataError("model: empty training set");
  if (static_cast<Index>(train_y.size()) != n) throw DataError("model: train_y length differs from train_X rows");
  if (m < 1) throw DataError("model: no basis metrics");
  if (basis.dim() != d) throw DataError("model: basis metric dimension differs from training dimension");
  if (W.rows() != n || W.cols() != m) throw DataError("model: W must be n x m");
  if (anchors.centers.rows() != m || anchors.centers.cols() != d) throw DataError("model: anchors must be m x d");
  if (preprocess.output_dim() != d) throw DataError("model: preprocess output dimension differs from training dimension");
  if (variant == Variant::SML && m != 1) throw DataError("model: SML requires exactly one basis metric");
  if (variant == Variant::CBLML) {
    if (static_cast<Index>(anchors.assignment.size()) != n) throw DataError("model: CBLML needs an anchor assignment per instance");
    for (Index i = 0; i < n; ++i) {
      const Index a = anchors.assignment[static_cast<size_t>(i)];
      if (a < 0 || a >= m || W.matrix()(i, a) != 1.0) {
        std::ostringstream os;
        os << "model: CBLML weight row " << i << " is not one-hot on its anchor";
        throw DataError(os.str());
      }
    }
  }
}

Vector query_weights(const PlmlModel& model, const VectorRef& x_pre) {
  switch (model.variant) {
    case Variant::SML: return Vector::Ones(1);
    case Variant::CBLML: {
      Vector w = Vector::Zero(model.basis.size());
      w(nearest_anchor(model.anchors.centers, x_pre)) = 1.0;
      return w;
    }
    case Variant::PLML: break;
  }
  return assign_test_weights(x_pre, model.train_X, model.W);
}

namespace {

bool use_combined(const PlmlModel& model, DistancePath path) {
  if (path == DistancePath::Auto) return model.basis.size() > 1;
  return path == DistancePath::CombinedMatrix;
}

}  // namespace

Vector query_distances(const PlmlModel& model, const VectorRef& x, const VectorRef& w, DistancePath path) {
  require(x.size() == model.train_X.cols() && w.size() == model.basis.size(), "query_distances: size mismatch");
  const Matrix diffs = model.train_X.rowwise() - x.transpose();
  if (use_combined(model, path)) {
    const Matrix M = combine_metric(w, model.basis).matrix();
    return ((diffs * M).array() * diffs.array()).rowwise().sum().cwiseMax(0.0).matrix();
  }
  Vector out = Vector::Zero(diffs.rows());
  for (Index l = 0; l < model.basis.size(); ++l) {
    if (w(l) == 0.0) continue;
    const Matrix& M = model.basis[l].matrix();
    out += w(l) * ((diffs * M).array() * diffs.array()).rowwise().sum().cwiseMax(0.0).matrix();
  }
  return out;
}

namespace {

Index argmin_excluding(const Vector& d, Index skip) {
  Index best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < d.size(); ++j) {
    if (j == skip) continue;
    if (best < 0 || d(j) < best_d) {
      best_d = d(j);
      best = j;
    }
  }
  return best;
}

}  // namespace

int predict_preprocessed(const PlmlModel& model, const VectorRef& x_pre, DistancePath path) {
  require(x_pre.size() == model.train_X.cols(), "predict: query dimension differs from model");
  const Vector w = query_weights(model, x_pre);
  const Vector d = query_distances(model, x_pre, w, path);
  return model.train_y[static_cast<size_t>(argmin_excluding(d, -1))];
}

int predict(const PlmlModel& model, const VectorRef& x_raw, DistancePath path) {
  const Matrix row = x_raw.transpose();
  const auto pre = apply_preprocess(model.preprocess, row);
  return predict_preprocessed(model, pre.X.row(0).transpose(), path);
}

std::vector<int> predict_batch_preprocessed(const PlmlModel& model, const Matrix& X_pre, int threads,
                                            DistancePath path) {
  require(X_pre.rows() == 0 || X_pre.cols() == model.train_X.cols(), "predict_batch: dimension mismatch");
  std::vector<int> out(static_cast<size_t>(X_pre.rows()), 0);
  const Index n = X_pre.rows();
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  auto run = [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) out[static_cast<size_t>(i)] = predict_preprocessed(model, X_pre.row(i).transpose(), path);
  };
  if (workers <= 1) {
    run(0, n);
    return out;
  }
  std::vector<std::thread> pool;
  const Index chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index b = w * chunk;
    const Index e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back(run, b, e);
  }
  for (auto& t : pool) t.join();
  return out;
}

std::vector<int> predict_batch(const PlmlModel& model, const Matrix& X_raw, int threads, DistancePath path) {
  if (X_raw.rows() == 0) return {};
  const auto pre = apply_preprocess(model.preprocess, X_raw);
  return predict_batch_preprocessed(model, pre.X, threads, path);
}

double leave_one_out_accuracy(const PlmlModel& model, DistancePath path) {
  const Index n = model.train_X.rows();
  require(n >= 2, "leave_one_out_accuracy: need at least two training instances");
  Index correct = 0;
  for (Index i = 0; i < n; ++i) {
    const Vector w = model.W.row(i);
    const Vector d = query_distances(model, model.train_X.row(i).transpose(), w, path);
    const Index j = argmin_excluding(d, i);
    if (model.train_y[static_cast<size_t>(j)] == model.train_y[static_cast<size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  require(predicted.size() == truth.size(), "accuracy: length mismatch");
  if (truth.empty()) return 0.0;
  size_t hit = 0;
  for (size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::vector<int> euclidean_1nn(const Matrix& train_X, const std::vector<int>& train_y, const Matrix& queries) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(queries.rows()));
  for (Index q = 0; q < queries.rows(); ++q) {
    out.push_back(train_y[static_cast<size_t>(nearest_training_row(train_X, queries.row(q).transpose()))]);
  }
  return out;
}

}  // namespace plml
