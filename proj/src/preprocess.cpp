#include "plml/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "plml/error.hpp"

namespace plml {
namespace {

Matrix standardize(const PreprocessModel& model, const Matrix& X) {
  const auto k = static_cast<Index>(model.kept_features.size());
  Matrix out(X.rows(), k);
  for (Index c = 0; c < k; ++c) {
    out.col(c) = (X.col(model.kept_features[static_cast<size_t>(c)]).array() - model.feature_means(c)) /
                 model.feature_stds(c);
  }
  return out;
}

void normalize_in_place(Matrix& X, std::vector<Index>* zero_rows) {
  for (Index i = 0; i < X.rows(); ++i) {
    const double norm = X.row(i).norm();
    if (norm == 0.0) {
      if (zero_rows) zero_rows->push_back(i);
      continue;
    }
    X.row(i) /= norm;
  }
}

// Principal axes of `Z`, sorted by descending eigenvalue (ties: lowest index),
// each oriented so its entry of largest magnitude is positive.
void fit_pca(const Matrix& Z, double target, PreprocessModel& model) {
  model.pca_mean = Z.colwise().mean().transpose();
  const Matrix centered = Z.rowwise() - model.pca_mean.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(Z.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (cov + cov.transpose()));
  if (es.info() != Eigen::Success) throw SolverError("PCA eigendecomposition failed");

  const Index d = cov.rows();
  std::vector<Index> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return ev(a) > ev(b); });

  double total = 0.0;
  for (Index i = 0; i < d; ++i) total += std::max(ev(i), 0.0);
  Index keep = d;
  double acc = 0.0;
  if (total > 0.0) {
    for (Index r = 0; r < d; ++r) {
      acc += std::max(ev(order[static_cast<size_t>(r)]), 0.0);
      if (acc / total >= target - 1e-12) {
        keep = r + 1;
        break;
      }
    }
  } else {
    keep = 1;
    acc = 0.0;
  }
  if (keep == d) acc = total;

  Matrix comps(d, keep);
  for (Index r = 0; r < keep; ++r) {
    Vector v = es.eigenvectors().col(order[static_cast<size_t>(r)]);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    comps.col(r) = v;
  }
  model.pca_components = std::move(comps);
  model.retained_variance_fraction = total > 0.0 ? acc / total : 1.0;
}

}  // namespace

PreprocessModel PreprocessModel::identity(Index d) {
  PreprocessModel m;
  m.input_dim = d;
  m.kept_features.resize(static_cast<size_t>(d));
  std::iota(m.kept_features.begin(), m.kept_features.end(), Index{0});
  m.feature_means = Vector::Zero(d);
  m.feature_stds = Vector::Ones(d);
  return m;
}

PreprocessModel fit_preprocess(const Matrix& train, const PreprocessOptions& options) {
  require(train.rows() >= 2, "fit_preprocess: need at least two training rows");
  require(options.variance_target > 0.0 && options.variance_target <= 1.0,
          "fit_preprocess: variance target must lie in (0, 1]");
  if (!train.allFinite()) throw DataError("fit_preprocess: non-finite training values");

  PreprocessModel model;
  model.input_dim = train.cols();
  model.normalize_rows = options.normalize_rows;
  model.pca_position = options.pca_position;

  const Vector means = train.colwise().mean().transpose();
  const double denom = static_cast<double>(train.rows() - 1);
  std::vector<double> kept_means, kept_stds;
  for (Index c = 0; c < train.cols(); ++c) {
    const double var = (train.col(c).array() - means(c)).square().sum() / denom;
    const double sd = std::sqrt(var);
    // Constant columns (up to rounding relative to their magnitude) carry no information.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(means(c))))) continue;
    model.kept_features.push_back(c);
    kept_means.push_back(means(c));
    kept_stds.push_back(sd);
  }
  if (model.kept_features.empty()) throw DataError("fit_preprocess: every feature is constant");
  model.feature_means = Eigen::Map<const Vector>(kept_means.data(), static_cast<Index>(kept_means.size()));
  model.feature_stds = Eigen::Map<const Vector>(kept_stds.data(), static_cast<Index>(kept_stds.size()));

  if (options.use_pca) {
    Matrix Z = standardize(model, train);
    if (model.normalize_rows && model.pca_position == PcaPosition::AfterNorm) normalize_in_place(Z, nullptr);
    fit_pca(Z, options.variance_target, model);
  }
  return model;
}

PreprocessedRows apply_preprocess(const PreprocessModel& model, const Matrix& X) {
  if (X.cols() != model.input_dim) {
    std::ostringstream os;
    os << "apply_preprocess: expected " << model.input_dim << " columns, got " << X.cols();
    throw ContractError(os.str());
  }
  PreprocessedRows out;
  out.X = standardize(model, X);
  const bool pca_first = model.pca_components && model.pca_position == PcaPosition::BeforeNorm;
  if (pca_first) out.X = (out.X.rowwise() - model.pca_mean.transpose()) * (*model.pca_components);
  if (model.normalize_rows) normalize_in_place(out.X, &out.zero_rows);
  if (model.pca_components && !pca_first) {
    out.X = (out.X.rowwise() - model.pca_mean.transpose()) * (*model.pca_components);
  }
  return out;
}

}  // namespace plml
