#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace plml {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Vector>;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kSimplexSumTol = 1e-9;
inline constexpr double kSimplexEntryTol = 1e-12;

/// Labelled instances. Rows of X are instances; labels are coded 1..num_classes.
/// `class_names[c - 1]` keeps the original spelling of class c.
struct Dataset {
  Matrix X;
  std::vector<int> y;
  int num_classes = 0;
  std::vector<std::string> class_names;

  Index n() const { return X.rows(); }
  Index d() const { return X.cols(); }

  /// Throws DataError naming the first violated invariant.
  void validate() const;

  /// Builds a dataset from arbitrary integer labels, recoding them to 1..c in
  /// ascending order of the original value.
  static Dataset from_labels(Matrix X, const std::vector<int>& raw_labels);

  /// Rows picked by `rows`, keeping the class coding of this dataset.
  Dataset subset(const std::vector<Index>& rows) const;
};

/// Symmetric positive semidefinite d x d matrix.
class MetricMatrix {
 public:
  /// Validates symmetry (max abs asymmetry <= 1e-10) and min eigenvalue >= -1e-10.
  explicit MetricMatrix(Matrix m);

  /// Skips validation; for matrices that are PSD by construction.
  static MetricMatrix trusted(Matrix m);

  static MetricMatrix identity(Index d) { return trusted(Matrix::Identity(d, d)); }

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  struct TrustedTag {};
  MetricMatrix(Matrix m, TrustedTag) : m_(std::move(m)) {}

  Matrix m_;
};

/// n x m nonnegative matrix whose rows lie on the probability simplex.
class WeightMatrix {
 public:
  WeightMatrix() = default;

  /// Validates entries >= -1e-12 and row sums within 1e-9 of one.
  explicit WeightMatrix(Matrix w);

  static WeightMatrix uniform(Index n, Index m);
  static WeightMatrix one_hot(const std::vector<Index>& assignment, Index m);

  const Matrix& matrix() const { return w_; }
  Index rows() const { return w_.rows(); }
  Index cols() const { return w_.cols(); }
  Vector row(Index i) const { return w_.row(i).transpose(); }

 private:
  Matrix w_;
};

/// The m basis metrics, index-aligned with anchors and weight columns.
class BasisMetrics {
 public:
  BasisMetrics() = default;
  explicit BasisMetrics(std::vector<MetricMatrix> metrics);

  static BasisMetrics identity(Index m, Index d);

  Index size() const { return static_cast<Index>(metrics_.size()); }
  Index dim() const { return metrics_.empty() ? 0 : metrics_.front().dim(); }
  const MetricMatrix& operator[](Index l) const { return metrics_[static_cast<size_t>(l)]; }
  const std::vector<MetricMatrix>& metrics() const { return metrics_; }

 private:
  std::vector<MetricMatrix> metrics_;
};

/// Returns true when every entry is >= -entry_tol and the sum is within sum_tol of 1.
bool on_simplex(const VectorRef& w, double entry_tol = kSimplexEntryTol,
                double sum_tol = kSimplexSumTol);

/// (a - b)^T M (a - b), clamped at zero.
double mahalanobis_sq(const MetricMatrix& M, const VectorRef& a, const VectorRef& b);

/// Sum over bases of weights[l] * mahalanobis_sq(basis[l], a, b).
double local_distance_sq(const VectorRef& weights, const BasisMetrics& basis, const VectorRef& a,
                         const VectorRef& b);

/// Sum over bases of weights[l] * basis[l].
MetricMatrix combine_metric(const VectorRef& weights, const BasisMetrics& basis);

/// Smallest eigenvalue of the symmetric part of `m`.
double min_eigenvalue(const Matrix& m);

double max_asymmetry(const Matrix& m);

}  // namespace plml
