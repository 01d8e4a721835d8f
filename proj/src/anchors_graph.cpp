#include "plml/anchors_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "plml/error.hpp"

namespace plml {
namespace {

Vector squared_distances_to(const Matrix& X, const VectorRef& x) {
  return (X.rowwise() - x.transpose()).rowwise().squaredNorm();
}

// Returns the nearest center for each row and the total squared distance.
double assign_rows(const Matrix& X, const Matrix& centers, std::vector<Index>& assignment) {
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index l = 0; l < centers.rows(); ++l) {
      const double d = (X.row(i) - centers.row(l)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = l;
      }
    }
    assignment[static_cast<size_t>(i)] = best;
    total += best_d;
  }
  return total;
}

Matrix seed_plus_plus(const Matrix& X, Index m, std::mt19937_64& rng) {
  const Index n = X.rows();
  Matrix centers(m, X.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = X.row(pick(rng));
  Vector closest = squared_distances_to(X, centers.row(0).transpose());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index l = 1; l < m; ++l) {
    const double total = closest.sum();
    Index chosen = 0;
    if (total > 0.0) {
      const double r = unit(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += closest(i);
        if (acc > r && closest(i) > 0.0) {
          chosen = i;
          break;
        }
      }
      if (closest(chosen) == 0.0) {
        // rounding pushed us past the last positive entry
        for (Index i = n - 1; i >= 0; --i) {
          if (closest(i) > 0.0) {
            chosen = i;
            break;
          }
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(l) = X.row(chosen);
    closest = closest.cwiseMin(squared_distances_to(X, centers.row(l).transpose()));
  }
  return centers;
}

}  // namespace

AnchorModel kmeans(const Matrix& X, Index m, std::uint64_t seed, int max_iter,
                   std::vector<double>* objective_trace) {
  const Index n = X.rows();
  if (m < 1 || m > n) {
    std::ostringstream os;
    os << "kmeans: need 1 <= m <= n (m = " << m << ", n = " << n << ")";
    throw ContractError(os.str());
  }
  std::mt19937_64 rng(seed);
  AnchorModel model;
  model.centers = seed_plus_plus(X, m, rng);
  model.assignment.assign(static_cast<size_t>(n), 0);
  assign_rows(X, model.centers, model.assignment);

  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix sums = Matrix::Zero(m, X.cols());
    std::vector<Index> counts(static_cast<size_t>(m), 0);
    for (Index i = 0; i < n; ++i) {
      const Index l = model.assignment[static_cast<size_t>(i)];
      sums.row(l) += X.row(i);
      ++counts[static_cast<size_t>(l)];
    }
    for (Index l = 0; l < m; ++l) {
      if (counts[static_cast<size_t>(l)] > 0) {
        model.centers.row(l) = sums.row(l) / static_cast<double>(counts[static_cast<size_t>(l)]);
      }
    }
    // Empty clusters take the point farthest from its own center.
    for (Index l = 0; l < m; ++l) {
      if (counts[static_cast<size_t>(l)] > 0) continue;
      Index far = 0;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const Index a = model.assignment[static_cast<size_t>(i)];
        if (counts[static_cast<size_t>(a)] <= 1) continue;
        const double d = (X.row(i) - model.centers.row(a)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      const Index old = model.assignment[static_cast<size_t>(far)];
      --counts[static_cast<size_t>(old)];
      ++counts[static_cast<size_t>(l)];
      model.assignment[static_cast<size_t>(far)] = l;
      model.centers.row(l) = X.row(far);
    }
    if (objective_trace) {
      double wcss = 0.0;
      for (Index i = 0; i < n; ++i) {
        wcss += (X.row(i) - model.centers.row(model.assignment[static_cast<size_t>(i)])).squaredNorm();
      }
      objective_trace->push_back(wcss);
    }
    std::vector<Index> next(static_cast<size_t>(n), 0);
    assign_rows(X, model.centers, next);
    const bool stable = next == model.assignment;
    model.assignment = std::move(next);
    if (stable) break;
  }
  return model;
}

Index nearest_anchor(const Matrix& centers, const VectorRef& x) {
  require(centers.cols() == x.size(), "nearest_anchor: dimension mismatch");
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index l = 0; l < centers.rows(); ++l) {
    const double d = (centers.row(l).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = l;
    }
  }
  return best;
}

Matrix build_anchor_distances(const Matrix& U, const Matrix& X) {
  require(U.cols() == X.cols(), "build_anchor_distances: dimension mismatch");
  Matrix G(U.rows(), X.rows());
  for (Index j = 0; j < X.rows(); ++j) {
    for (Index l = 0; l < U.rows(); ++l) G(l, j) = (U.row(l) - X.row(j)).squaredNorm();
  }
  return G;
}

std::vector<Index> nearest_rows(const Matrix& X, Index i, Index k) {
  const Index n = X.rows();
  const Vector d = squared_distances_to(X, X.row(i).transpose());
  std::vector<Index> idx;
  idx.reserve(static_cast<size_t>(n - 1));
  for (Index j = 0; j < n; ++j) {
    if (j != i) idx.push_back(j);
  }
  k = std::min<Index>(k, static_cast<Index>(idx.size()));
  auto closer = [&](Index a, Index b) { return d(a) < d(b) || (d(a) == d(b) && a < b); };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), closer);
  idx.resize(static_cast<size_t>(k));
  return idx;
}

LaplacianGraph build_laplacian(const Matrix& X, int knn_k, SimilarityKernel kernel) {
  const Index n = X.rows();
  require(knn_k >= 1 && knn_k < n, "build_laplacian: need 1 <= knn_k < n");

  std::vector<std::vector<Index>> neighbors(static_cast<size_t>(n));
  Vector sigma(n);
  for (Index i = 0; i < n; ++i) {
    auto& nb = neighbors[static_cast<size_t>(i)];
    nb = nearest_rows(X, i, knn_k);
    double s = (X.row(i) - X.row(nb.back())).norm();
    if (s == 0.0) {
      // duplicates: use the smallest nonzero neighbor distance instead
      for (Index j : nb) {
        const double dj = (X.row(i) - X.row(j)).norm();
        if (dj > 0.0) {
          s = dj;
          break;
        }
      }
    }
    sigma(i) = s;
  }

  auto similarity = [&](Index i, Index j) {
    if (kernel == SimilarityKernel::Binary) return 1.0;
    const double d2 = (X.row(i) - X.row(j)).squaredNorm();
    if (d2 == 0.0) return 1.0;
    double scale = sigma(i) * sigma(j);
    if (scale == 0.0) scale = std::pow(std::max(sigma(i), sigma(j)), 2);
    if (scale == 0.0) return 0.0;
    return std::exp(-d2 / scale);
  };

  // Union of neighborhoods: an edge exists when either endpoint lists the other.
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<size_t>(n) * static_cast<size_t>(knn_k) * 2);
  std::vector<std::vector<Index>> adj(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j : neighbors[static_cast<size_t>(i)]) {
      adj[static_cast<size_t>(i)].push_back(j);
      adj[static_cast<size_t>(j)].push_back(i);
    }
  }
  for (Index i = 0; i < n; ++i) {
    auto& a = adj[static_cast<size_t>(i)];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    for (Index j : a) {
      if (j > i) {
        const double s = similarity(i, j);
        entries.emplace_back(i, j, s);
        entries.emplace_back(j, i, s);
      }
    }
  }

  LaplacianGraph g;
  g.knn_k = knn_k;
  g.S.resize(n, n);
  g.S.setFromTriplets(entries.begin(), entries.end());
  g.S.makeCompressed();

  std::vector<Eigen::Triplet<double>> lap;
  lap.reserve(entries.size() + static_cast<size_t>(n));
  Vector degree = Vector::Zero(n);
  for (const auto& t : entries) {
    degree(t.row()) += t.value();
    lap.emplace_back(t.row(), t.col(), -t.value());
  }
  for (Index i = 0; i < n; ++i) lap.emplace_back(i, i, degree(i));
  g.L.resize(n, n);
  g.L.setFromTriplets(lap.begin(), lap.end());
  g.L.makeCompressed();
  return g;
}

}  // namespace plml
