// Shared generators and independent oracles for the test suites. Nothing here
// calls into the code paths it is used to check.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "plml/types.hpp"

namespace plml::testing {

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

inline Matrix random_psd(std::mt19937_64& rng, Index d, Index rank = -1) {
  if (rank < 0) rank = d;
  const Matrix A = random_matrix(rng, d, rank);
  Matrix M = A * A.transpose();
  return 0.5 * (M + M.transpose());
}

inline Matrix random_symmetric(std::mt19937_64& rng, Index d) {
  const Matrix A = random_matrix(rng, d, d);
  return 0.5 * (A + A.transpose());
}

inline Vector random_simplex_point(std::mt19937_64& rng, Index m) {
  std::exponential_distribution<double> e(1.0);
  Vector w(m);
  for (Index i = 0; i < m; ++i) w(i) = e(rng);
  return w / w.sum();
}

inline Matrix random_weights(std::mt19937_64& rng, Index n, Index m) {
  Matrix W(n, m);
  for (Index i = 0; i < n; ++i) W.row(i) = random_simplex_point(rng, m).transpose();
  return W;
}

/// Triple-loop quadratic form sum_jk v_j M_jk v_k.
inline double naive_quadratic(const Matrix& M, const Vector& v) {
  double s = 0.0;
  for (Index j = 0; j < v.size(); ++j) {
    for (Index k = 0; k < v.size(); ++k) s += v(j) * M(j, k) * v(k);
  }
  return s;
}

/// Eigenvalues through the general (non-symmetric) solver, sorted ascending.
inline std::vector<double> general_eigenvalues(const Matrix& M) {
  Eigen::EigenSolver<Matrix> es(M, false);
  std::vector<double> ev;
  for (Index i = 0; i < M.rows(); ++i) ev.push_back(es.eigenvalues()(i).real());
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Simplex projection oracle: bisection on the KKT threshold theta with
/// sum max(v - theta, 0) = 1.
inline Vector kkt_simplex_projection(const Vector& v) {
  double lo = v.minCoeff() - 1.0;
  double hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = (v.array() - mid).cwiseMax(0.0).sum();
    if (s > 1.0) lo = mid;
    else hi = mid;
  }
  const double theta = 0.5 * (lo + hi);
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

/// Central finite-difference gradient of f at x.
template <class F>
Matrix central_differences(F&& f, const Matrix& x, double h = 1e-6) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      const double keep = probe(i, j);
      probe(i, j) = keep + h;
      const double fp = f(probe);
      probe(i, j) = keep - h;
      const double fm = f(probe);
      probe(i, j) = keep;
      g(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

inline double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1e-12, std::max(a.norm(), b.norm()));
}

}  // namespace plml::testing
