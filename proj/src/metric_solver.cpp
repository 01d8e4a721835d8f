#include "plml/metric_solver.hpp"

#include <atomic>
#include <map>
#include <sstream>

#include "plml/error.hpp"
#include "plml/log.hpp"

namespace plml {
namespace {

std::atomic<std::uint64_t> g_eigendecompositions{0};

}  // namespace

void MetricProblem::validate() const {
  require(alpha1 > 0.0, "metric problem: alpha1 must be positive");
  require(alpha2 >= 0.0, "metric problem: alpha2 must be nonnegative");
  require(W.rows() == X.rows(), "metric problem: W must have one row per instance");
  const Index n = X.rows();
  for (const auto& t : triplets.triplets) {
    require(t.i >= 0 && t.i < n && t.j >= 0 && t.j < n && t.k >= 0 && t.k < n,
            "metric problem: triplet index out of range");
  }
  for (const auto& [i, j] : triplets.same_class_pairs) {
    require(i >= 0 && i < n && j >= 0 && j < n, "metric problem: pair index out of range");
  }
}

PsdSplit psd_split(const Matrix& K) {
  require(K.rows() == K.cols(), "psd_split: matrix must be square");
  const Matrix sym = 0.5 * (K + K.transpose());
  PsdSplit out;
  if (sym.size() == 0) {
    out.positive = sym;
    out.residual = sym;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  g_eigendecompositions.fetch_add(1, std::memory_order_relaxed);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigendecomposition failed for matrix:\n" << sym;
    throw SolverError(os.str());
  }
  const Vector& ev = es.eigenvalues();
  const Matrix& V = es.eigenvectors();
  const Vector pos = ev.cwiseMax(0.0);
  const Vector neg = (-ev).cwiseMax(0.0);
  out.positive = V * pos.asDiagonal() * V.transpose();
  out.positive = 0.5 * (out.positive + out.positive.transpose());
  if (neg.maxCoeff() > 0.0) {
    out.residual = V * neg.asDiagonal() * V.transpose();
    out.residual = 0.5 * (out.residual + out.residual.transpose());
  } else {
    out.residual = Matrix::Zero(K.rows(), K.cols());
  }
  out.residual_sq_norm = neg.squaredNorm();
  return out;
}

Matrix psd_project(const Matrix& K) { return psd_split(K).positive; }

std::uint64_t eigendecomposition_count() { return g_eigendecompositions.load(std::memory_order_relaxed); }

Vector box_project(const VectorRef& v) { return v.cwiseMax(0.0).cwiseMin(1.0); }

DualModel::DualModel(const MetricProblem& problem) : W_(problem.W.matrix()), alpha1_(problem.alpha1) {
  problem.validate();
  const Index d = problem.X.cols();
  const Index m = W_.cols();

  std::map<std::pair<Index, Index>, Index> pair_index;
  std::vector<std::pair<Index, Index>> pairs;
  auto intern = [&](Index i, Index j) {
    auto [it, inserted] = pair_index.emplace(std::make_pair(i, j), static_cast<Index>(pairs.size()));
    if (inserted) pairs.emplace_back(i, j);
    return it->second;
  };
  triplets_.reserve(problem.triplets.triplets.size());
  for (const auto& t : problem.triplets.triplets) {
    triplets_.push_back({t.i, intern(t.i, t.j), intern(t.i, t.k)});
  }
  pair_diffs_.resize(static_cast<Index>(pairs.size()), d);
  pair_owner_.resize(pairs.size());
  for (size_t p = 0; p < pairs.size(); ++p) {
    pair_diffs_.row(static_cast<Index>(p)) = problem.X.row(pairs[p].first) - problem.X.row(pairs[p].second);
    pair_owner_[p] = pairs[p].first;
  }

  // Pull term P_l = alpha2 sum_(i,j) W_il x_ij x_ij^T over the same-class pairs.
  const auto& sc = problem.triplets.same_class_pairs;
  Matrix diffs(static_cast<Index>(sc.size()), d);
  Matrix owner_w(static_cast<Index>(sc.size()), m);
  for (size_t q = 0; q < sc.size(); ++q) {
    diffs.row(static_cast<Index>(q)) = problem.X.row(sc[q].first) - problem.X.row(sc[q].second);
    owner_w.row(static_cast<Index>(q)) = W_.row(sc[q].first);
  }
  pull_.reserve(static_cast<size_t>(m));
  for (Index l = 0; l < m; ++l) {
    Matrix P = problem.alpha2 * (diffs.transpose() * (diffs.array().colwise() * owner_w.col(l).array()).matrix());
    pull_.push_back(0.5 * (P + P.transpose()));
  }
}

Matrix DualModel::weighted_gram(const Vector& coeff) const {
  return pair_diffs_.transpose() * (pair_diffs_.array().colwise() * coeff.array()).matrix();
}

std::vector<Matrix> DualModel::assemble_K(const VectorRef& gamma) const {
  require(gamma.size() == num_triplets(), "assemble_K: gamma length differs from triplet count");
  // s_p = sum of gamma over triplets using pair p as the far pair, minus as the near pair
  Vector s = Vector::Zero(pair_diffs_.rows());
  for (size_t t = 0; t < triplets_.size(); ++t) {
    const double g = gamma(static_cast<Index>(t));
    s(triplets_[t].far) += g;
    s(triplets_[t].near) -= g;
  }
  std::vector<Matrix> K;
  K.reserve(pull_.size());
  Vector coeff(pair_diffs_.rows());
  for (Index l = 0; l < num_bases(); ++l) {
    for (Index p = 0; p < coeff.size(); ++p) coeff(p) = s(p) * W_(pair_owner_[static_cast<size_t>(p)], l);
    Matrix Kl = pull_[static_cast<size_t>(l)];
    if (coeff.size() > 0) Kl -= weighted_gram(coeff);
    K.push_back(0.5 * (Kl + Kl.transpose()));
  }
  return K;
}

double DualModel::objective(const VectorRef& gamma) const {
  const auto K = assemble_K(gamma);
  double value = -gamma.sum();
  for (const auto& Kl : K) value += psd_split(Kl).residual_sq_norm / (4.0 * alpha1_);
  return value;
}

double DualModel::objective_and_gradient(const VectorRef& gamma, Vector& grad) const {
  const auto K = assemble_K(gamma);
  double value = -gamma.sum();
  grad = Vector::Constant(num_triplets(), -1.0);
  for (Index l = 0; l < num_bases(); ++l) {
    const PsdSplit split = psd_split(K[static_cast<size_t>(l)]);
    value += split.residual_sq_norm / (4.0 * alpha1_);
    if (split.residual_sq_norm == 0.0 || triplets_.empty()) continue;
    // <R, x x^T> for every distinct pair
    const Vector quad = ((pair_diffs_ * split.residual).array() * pair_diffs_.array()).rowwise().sum();
    const double scale = 1.0 / (2.0 * alpha1_);
    for (size_t t = 0; t < triplets_.size(); ++t) {
      const auto& tp = triplets_[t];
      const double w = W_(tp.owner, l);
      if (w == 0.0) continue;
      grad(static_cast<Index>(t)) += scale * w * (quad(tp.far) - quad(tp.near));
    }
  }
  return value;
}

BasisMetrics DualModel::recover_metrics(const VectorRef& gamma) const {
  const auto K = assemble_K(gamma);
  std::vector<MetricMatrix> metrics;
  metrics.reserve(K.size());
  for (const auto& Kl : K) metrics.push_back(MetricMatrix::trusted(psd_split(Kl).residual / (2.0 * alpha1_)));
  return BasisMetrics(std::move(metrics));
}

std::vector<Matrix> assemble_K(const MetricProblem& prob, const VectorRef& gamma) {
  return DualModel(prob).assemble_K(gamma);
}

double dual_objective(const MetricProblem& prob, const VectorRef& gamma) { return DualModel(prob).objective(gamma); }

Vector dual_gradient(const MetricProblem& prob, const VectorRef& gamma) {
  Vector g;
  DualModel(prob).objective_and_gradient(gamma, g);
  return g;
}

MetricSolveResult solve_basis_metrics(const MetricProblem& prob, const FistaOptions& options,
                                      const FistaObserver& observer) {
  const DualModel model(prob);
  SmoothProblem sp;
  sp.value = [&](const Matrix& g) { return model.objective(g.col(0)); };
  sp.value_and_gradient = [&](const Matrix& g, Matrix& grad) {
    Vector gv;
    const double v = model.objective_and_gradient(g.col(0), gv);
    grad = gv;
    return v;
  };
  sp.project = [](const Matrix& v) -> Matrix { return v.cwiseMax(0.0).cwiseMin(1.0); };

  const Matrix gamma0 = Matrix::Zero(model.num_triplets(), 1);
  FistaResult report = fista_minimize(sp, gamma0, options, observer);

  MetricSolveResult out;
  out.gamma = report.solution.col(0);
  out.converged = report.converged;
  out.basis = model.recover_metrics(out.gamma);
  if (!out.converged) {
    std::ostringstream os;
    os << "basis metric solver stopped at the iteration cap (" << report.iterations
       << " iterations, residual " << report.residual << "); returning best iterate";
    log::warn(os.str());
  }
  out.report = std::move(report);
  return out;
}

}  // namespace plml
