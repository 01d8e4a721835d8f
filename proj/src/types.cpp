#include "plml/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "plml/error.hpp"

namespace plml {

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw DataError("dataset must have n >= 1 and d >= 1");
  if (static_cast<Index>(y.size()) != X.rows()) {
    std::ostringstream os;
    os << "label count " << y.size() << " does not match instance count " << X.rows();
    throw DataError(os.str());
  }
  if (!X.allFinite()) throw DataError("dataset contains non-finite feature values");
  if (num_classes < 1) throw DataError("dataset must have at least one class");
  std::vector<Index> counts(static_cast<size_t>(num_classes), 0);
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 1 || y[i] > num_classes) {
      std::ostringstream os;
      os << "label " << y[i] << " of instance " << i << " outside 1.." << num_classes;
      throw DataError(os.str());
    }
    ++counts[static_cast<size_t>(y[i] - 1)];
  }
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      std::ostringstream os;
      os << "class " << (c + 1) << " has no instances";
      throw DataError(os.str());
    }
  }
}

Dataset Dataset::from_labels(Matrix X, const std::vector<int>& raw_labels) {
  std::map<int, int> code;
  for (int v : raw_labels) code.emplace(v, 0);
  Dataset ds;
  int next = 1;
  for (auto& [value, c] : code) {
    c = next++;
    ds.class_names.push_back(std::to_string(value));
  }
  ds.X = std::move(X);
  ds.y.reserve(raw_labels.size());
  for (int v : raw_labels) ds.y.push_back(code.at(v));
  ds.num_classes = static_cast<int>(code.size());
  return ds;
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Dataset out;
  out.X.resize(static_cast<Index>(rows.size()), X.cols());
  out.y.reserve(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Index>(r)) = X.row(rows[r]);
    out.y.push_back(y[static_cast<size_t>(rows[r])]);
  }
  out.num_classes = num_classes;
  out.class_names = class_names;
  return out;
}

double max_asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("eigenvalue computation failed");
  return es.eigenvalues()(0);
}

MetricMatrix::MetricMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw ContractError("metric matrix must be square");
  if (!m_.allFinite()) throw ContractError("metric matrix has non-finite entries");
  if (max_asymmetry(m_) > kSymmetryTol) throw ContractError("metric matrix is not symmetric");
  if (min_eigenvalue(m_) < -kPsdTol) throw ContractError("metric matrix is not positive semidefinite");
}

MetricMatrix MetricMatrix::trusted(Matrix m) { return MetricMatrix(std::move(m), TrustedTag{}); }

bool on_simplex(const VectorRef& w, double entry_tol, double sum_tol) {
  if (w.size() == 0) return false;
  if (!w.allFinite()) return false;
  if (w.minCoeff() < -entry_tol) return false;
  return std::abs(w.sum() - 1.0) <= sum_tol;
}

WeightMatrix::WeightMatrix(Matrix w) : w_(std::move(w)) {
  if (w_.cols() < 1) throw ContractError("weight matrix needs at least one column");
  for (Index i = 0; i < w_.rows(); ++i) {
    if (!on_simplex(w_.row(i).transpose())) {
      std::ostringstream os;
      os << "weight row " << i << " is not on the simplex (sum " << w_.row(i).sum() << ", min "
         << w_.row(i).minCoeff() << ")";
      throw ContractError(os.str());
    }
  }
}

WeightMatrix WeightMatrix::uniform(Index n, Index m) {
  return WeightMatrix(Matrix::Constant(n, m, 1.0 / static_cast<double>(m)));
}

WeightMatrix WeightMatrix::one_hot(const std::vector<Index>& assignment, Index m) {
  Matrix w = Matrix::Zero(static_cast<Index>(assignment.size()), m);
  for (size_t i = 0; i < assignment.size(); ++i) {
    require(assignment[i] >= 0 && assignment[i] < m, "one-hot assignment out of range");
    w(static_cast<Index>(i), assignment[i]) = 1.0;
  }
  return WeightMatrix(std::move(w));
}

BasisMetrics::BasisMetrics(std::vector<MetricMatrix> metrics) : metrics_(std::move(metrics)) {
  for (const auto& m : metrics_) {
    if (m.dim() != metrics_.front().dim()) throw ContractError("basis metrics differ in dimension");
  }
}

BasisMetrics BasisMetrics::identity(Index m, Index d) {
  std::vector<MetricMatrix> ms;
  ms.reserve(static_cast<size_t>(m));
  for (Index l = 0; l < m; ++l) ms.push_back(MetricMatrix::identity(d));
  return BasisMetrics(std::move(ms));
}

double mahalanobis_sq(const MetricMatrix& M, const VectorRef& a, const VectorRef& b) {
  if (a.size() != b.size() || a.size() != M.dim()) {
    std::ostringstream os;
    os << "mahalanobis_sq: dimension mismatch (M " << M.dim() << ", a " << a.size() << ", b "
       << b.size() << ")";
    throw ContractError(os.str());
  }
  const Vector diff = a - b;
  const double v = diff.dot(M.matrix() * diff);
  return v < 0.0 ? 0.0 : v;
}

double local_distance_sq(const VectorRef& weights, const BasisMetrics& basis, const VectorRef& a,
                         const VectorRef& b) {
  require(weights.size() == basis.size(), "local_distance_sq: weight count differs from basis size");
  double total = 0.0;
  for (Index l = 0; l < basis.size(); ++l) {
    if (weights(l) == 0.0) continue;
    total += weights(l) * mahalanobis_sq(basis[l], a, b);
  }
  return total;
}

MetricMatrix combine_metric(const VectorRef& weights, const BasisMetrics& basis) {
  require(weights.size() == basis.size(), "combine_metric: weight count differs from basis size");
  require(basis.size() > 0, "combine_metric: empty basis");
  Matrix out = Matrix::Zero(basis.dim(), basis.dim());
  for (Index l = 0; l < basis.size(); ++l) out += weights(l) * basis[l].matrix();
  return MetricMatrix::trusted(0.5 * (out + out.transpose()));
}

}  // namespace plml
