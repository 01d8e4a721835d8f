#include <doctest.h>

#include "plml/error.hpp"
#include "plml/preprocess.hpp"
#include "support.hpp"

using namespace plml;
using namespace plml::testing;

namespace {

// Standardize with sample std, then divide each row by its norm; written out
// with explicit loops.
Matrix naive_standardize_normalize(const Matrix& X) {
  const Index n = X.rows(), d = X.cols();
  Matrix Z(n, d);
  for (Index c = 0; c < d; ++c) {
    double mean = 0.0;
    for (Index i = 0; i < n; ++i) mean += X(i, c);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (Index i = 0; i < n; ++i) ss += (X(i, c) - mean) * (X(i, c) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    for (Index i = 0; i < n; ++i) Z(i, c) = (X(i, c) - mean) / sd;
  }
  for (Index i = 0; i < n; ++i) {
    double norm = 0.0;
    for (Index c = 0; c < d; ++c) norm += Z(i, c) * Z(i, c);
    norm = std::sqrt(norm);
    for (Index c = 0; c < d; ++c) Z(i, c) /= norm;
  }
  return Z;
}

}  // namespace

TEST_CASE("constant features are dropped") {
  Matrix X(3, 3);
  X << 1, 5, 2, 2, 5, 4, 3, 5, 7;
  const auto model = fit_preprocess(X);
  CHECK(model.kept_features == std::vector<Index>{0, 2});
  CHECK(model.output_dim() == 2);
  CHECK(apply_preprocess(model, X).X.cols() == 2);
}

TEST_CASE("every feature constant is a data error") {
  Matrix X = Matrix::Constant(4, 3, 2.5);
  CHECK_THROWS_AS(fit_preprocess(X), DataError);
}

TEST_CASE("too few rows or wrong width is a contract error") {
  CHECK_THROWS_AS(fit_preprocess(Matrix::Ones(1, 2)), ContractError);
  Matrix X(3, 2);
  X << 1, 2, 3, 5, 4, 1;
  const auto model = fit_preprocess(X);
  CHECK_THROWS_AS(apply_preprocess(model, Matrix::Ones(2, 3)), ContractError);
}

TEST_CASE("points on a line keep one principal component") {
  Matrix X(20, 2);
  for (Index i = 0; i < 20; ++i) {
    const double t = static_cast<double>(i) - 7.5;
    X(i, 0) = t;
    X(i, 1) = 2.0 * t;
  }
  PreprocessOptions opt;
  opt.use_pca = true;
  const auto model = fit_preprocess(X, opt);
  REQUIRE(model.pca_components);
  CHECK(model.pca_components->cols() == 1);
  CHECK(model.retained_variance_fraction == doctest::Approx(1.0));
}

TEST_CASE("isotropic 10-D data needs all components for 95 percent") {
  std::mt19937_64 rng(3);
  const Matrix X = random_matrix(rng, 5000, 10);
  PreprocessOptions opt;
  opt.use_pca = true;
  const auto model = fit_preprocess(X, opt);
  REQUIRE(model.pca_components);

  // Oracle: spectrum of the normalized data's covariance via the general solver.
  const Matrix Z = naive_standardize_normalize(X);
  const Matrix C = Z.rowwise() - Z.colwise().mean();
  const auto ev = general_eigenvalues(C.transpose() * C / 4999.0);
  double total = 0.0;
  for (double v : ev) total += v;
  Index need = 0;
  double acc = 0.0;
  for (auto it = ev.rbegin(); it != ev.rend(); ++it) {
    acc += *it;
    ++need;
    if (acc / total >= 0.95) break;
  }
  CHECK(need == 10);
  CHECK(model.pca_components->cols() == need);
}

TEST_CASE("two-row toy matches the two-pass oracle") {
  Matrix X(2, 2);
  X << 1, 2, 3, 7;
  const auto model = fit_preprocess(X);
  const Matrix got = apply_preprocess(model, X).X;
  CHECK(relative_error(got, naive_standardize_normalize(X)) < 1e-14);
}

TEST_CASE("random data matches the two-pass oracle") {
  std::mt19937_64 rng(5);
  const Matrix X = random_matrix(rng, 50, 6, 3.0);
  const auto model = fit_preprocess(X);
  CHECK(relative_error(apply_preprocess(model, X).X, naive_standardize_normalize(X)) < 1e-12);
}

TEST_CASE("apply examples") {
  const auto id = PreprocessModel::identity(2);
  Matrix x(1, 2);
  x << 3, 4;
  const auto out = apply_preprocess(id, x);
  CHECK(out.X(0, 0) == doctest::Approx(0.6));
  CHECK(out.X(0, 1) == doctest::Approx(0.8));

  Matrix X(3, 2);
  X << 0, 0, 2, 4, 4, 8;
  const auto model = fit_preprocess(X);
  Matrix at_mean(1, 2);
  at_mean << 2, 4;
  const auto flagged = apply_preprocess(model, at_mean);
  CHECK(flagged.zero_rows == std::vector<Index>{0});
  CHECK(flagged.X.norm() == 0.0);
}

TEST_CASE("rows are unit norm without PCA and with PCA before normalization") {
  std::mt19937_64 rng(8);
  const Matrix X = random_matrix(rng, 80, 5);
  const Matrix Q = random_matrix(rng, 30, 5);
  for (bool pca : {false, true}) {
    PreprocessOptions opt;
    opt.use_pca = pca;
    opt.pca_position = PcaPosition::BeforeNorm;
    const auto model = fit_preprocess(X, opt);
    const Matrix Z = apply_preprocess(model, Q).X;
    for (Index i = 0; i < Z.rows(); ++i) CHECK(Z.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("PCA components are orthonormal, sign-fixed and meet the variance target") {
  std::mt19937_64 rng(9);
  Matrix X = random_matrix(rng, 200, 8);
  X.col(3) = 2.0 * X.col(1) + 0.1 * X.col(3);
  for (double target : {0.5, 0.8, 0.95, 1.0}) {
    PreprocessOptions opt;
    opt.use_pca = true;
    opt.variance_target = target;
    const auto model = fit_preprocess(X, opt);
    const Matrix& V = *model.pca_components;
    CHECK((V.transpose() * V - Matrix::Identity(V.cols(), V.cols())).norm() < 1e-10);
    CHECK(model.retained_variance_fraction >= target - 1e-12);
    for (Index c = 0; c < V.cols(); ++c) {
      Index arg = 0;
      V.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(V(arg, c) > 0.0);
    }
    const auto again = fit_preprocess(X, opt);
    CHECK(*again.pca_components == V);
  }
}
