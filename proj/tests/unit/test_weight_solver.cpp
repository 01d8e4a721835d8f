#include <doctest.h>

#include <sstream>

#include "plml/error.hpp"
#include "plml/weight_solver.hpp"
#include "oracles.hpp"

using namespace plml;
using namespace plml::testing;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

WeightProblem exact_anchor_problem() {
  WeightProblem p;
  p.X.resize(3, 2);
  p.X << 0, 0, 1, 0, 0, 2;
  p.U = p.X;
  p.G = build_anchor_distances(p.U, p.X);
  p.L = build_laplacian(p.X, 1).L;
  p.lambda1 = 0.0;
  p.lambda2 = 0.0;
  return p;
}

}  // namespace

TEST_CASE("momentum sequence") {
  CHECK(fista_next_t(1.0) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
  CHECK(fista_next_t(1.0) == doctest::Approx(1.6180339887));
  double t = 1.0;
  for (int i = 0; i < 50; ++i) {
    const double next = fista_next_t(t);
    CHECK(next > t);
    t = next;
  }
}

TEST_CASE("weight objective examples") {
  const auto p = exact_anchor_problem();
  CHECK(weight_objective(p, Matrix::Identity(3, 3)) == doctest::Approx(0.0));

  WeightProblem one;
  one.X.resize(2, 1);
  one.X << 1, 3;
  one.U.resize(1, 1);
  one.U << 2;
  one.G = build_anchor_distances(one.U, one.X);
  one.L = build_laplacian(one.X, 1).L;
  one.lambda1 = 0.5;
  one.lambda2 = 7.0;
  // One anchor: the smoothness term vanishes and the fit is sum (x - u)^2.
  const double expected = 2.0 + 0.5 * 2.0;
  CHECK(weight_objective(one, Matrix::Ones(2, 1)) == doctest::Approx(expected));
}

TEST_CASE("weight objective and gradient match the loop oracles") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_weight_problem(rng, 4 + trial % 6, 2, 2 + trial % 3, 0.7, 3.0);
    const Matrix W = random_weights(rng, p.n(), p.m());
    CHECK(weight_objective(p, W) == doctest::Approx(naive_weight_objective(p, W)).epsilon(1e-12));
    CHECK(relative_error(weight_gradient(p, W), naive_weight_gradient(p, W)) < 1e-12);
  }
}

TEST_CASE("weight gradient matches central differences") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_weight_problem(rng, 3 + trial % 10, 1 + trial % 3, 1 + trial % 2);
    const Matrix W = random_weights(rng, p.n(), p.m());
    const Matrix fd = central_differences([&](const Matrix& V) { return weight_objective(p, V); }, W, 1e-5);
    CHECK(relative_error(weight_gradient(p, W), fd) < 1e-5);
  }
}

TEST_CASE("gradient vanishes at an exact reconstruction without regularizers") {
  const auto p = exact_anchor_problem();
  CHECK(weight_gradient(p, Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("smoothness gradient on a two-node graph") {
  WeightProblem p;
  p.X.resize(2, 1);
  p.X << 0, 1;
  p.U = Matrix::Zero(2, 1);
  p.G = Matrix::Zero(2, 2);
  p.L = build_laplacian(p.X, 1, SimilarityKernel::Binary).L;
  p.lambda1 = 0.0;
  p.lambda2 = 3.0;
  Matrix W(2, 2);
  W << 1, 0, 0.25, 0.75;
  Matrix L(2, 2);
  L << 1, -1, -1, 1;
  CHECK(weight_gradient(p, W).isApprox(2.0 * 3.0 * L * W));
}

TEST_CASE("simplex projection examples") {
  CHECK(project_simplex(vec({0.5, 0.5})).isApprox(vec({0.5, 0.5})));
  CHECK(project_simplex(vec({2, 0})).isApprox(vec({1, 0})));
  CHECK(project_simplex(vec({0.6, 0.8})).isApprox(vec({0.4, 0.6})));
  CHECK(project_simplex(vec({-5})).isApprox(vec({1})));
  CHECK_THROWS_AS(project_simplex(Vector(0)), ContractError);
}

TEST_CASE("simplex projection matches the KKT oracle and is a projection") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index m = 1 + trial % 8;
    const Vector v = random_vector(rng, m, 1.0 + trial % 5);
    const Vector p = project_simplex(v);
    CHECK((p - kkt_simplex_projection(v)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(on_simplex(p));
    CHECK((project_simplex(p) - p).norm() <= 1e-12);
    const Vector u = random_vector(rng, m);
    CHECK((project_simplex(u) - p).norm() <= (u - v).norm() + 1e-12);
  }
}

TEST_CASE("rowwise projection") {
  std::mt19937_64 rng(24);
  const Matrix V = random_matrix(rng, 10, 4);
  const Matrix P = project_simplex_rows(V);
  for (Index i = 0; i < 10; ++i) CHECK(P.row(i).transpose().isApprox(project_simplex(V.row(i).transpose())));
}

TEST_CASE("exact anchors without regularizers recover the identity weights") {
  const auto p = exact_anchor_problem();
  const auto res = solve_weights(p, WeightMatrix::uniform(3, 3));
  CHECK((res.W.matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-3);
  CHECK(res.report.converged);
}

TEST_CASE("solve_weights contracts") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 4; ++trial) {
    const auto p = random_weight_problem(rng, 20, 3, 5, 1.0, trial % 2 ? 100.0 : 1.0);
    const auto W0 = WeightMatrix::uniform(p.n(), p.m());

    int bad_iterates = 0;
    auto observer = [&](const FistaState& s) {
      for (Index i = 0; i < s.iterate->rows(); ++i) bad_iterates += !on_simplex(s.iterate->row(i).transpose());
    };
    FistaOptions tight;
    tight.tol = 1e-8;
    tight.max_iter = 20000;
    const auto res = solve_weights(p, W0, tight, observer);
    CHECK(bad_iterates == 0);
    CHECK(res.report.converged);
    CHECK(res.report.residual <= 1e-5);
    CHECK(res.report.objective <= weight_objective(p, W0.matrix()) + 1e-12);
    CHECK(res.report.beta <= std::max(1.0, 2.0 * weight_lipschitz(p)));
    for (size_t r = 0; r + 1 < res.report.trace.size(); ++r) {
      CHECK(res.report.trace[r + 1].beta >= res.report.trace[r].beta);
    }

    const Matrix oracle = projected_gradient_oracle(p, W0.matrix(), 50000);
    CHECK(weight_objective(p, res.W.matrix()) <= naive_weight_objective(p, oracle) + 1e-6);
  }
}

TEST_CASE("trace CSV layout") {
  std::ostringstream os;
  write_trace_csv(os, {{1, 2.5, 4.0, 0.1}});
  CHECK(os.str() == "iteration,objective,beta,residual\n1,2.5,4,0.10000000000000001\n");
}

TEST_CASE("weighting error terms") {
  Matrix U(2, 1);
  U << 0, 2;
  auto [recon, loc] = weighting_error_terms(vec({0}), vec({1, 0}), U);
  CHECK(recon == doctest::Approx(0.0));
  CHECK(loc == doctest::Approx(0.0));
  std::tie(recon, loc) = weighting_error_terms(vec({1}), vec({0.5, 0.5}), U);
  CHECK(recon == doctest::Approx(0.0));
  CHECK(loc == doctest::Approx(1.0));

  std::mt19937_64 rng(26);
  const Matrix Ur = random_matrix(rng, 4, 3);
  const Vector x = random_vector(rng, 3);
  const Vector w = Vector::Constant(4, 0.25);
  double expected = 0.0;
  for (Index l = 0; l < 4; ++l) expected += 0.25 * std::pow((x - Ur.row(l).transpose()).norm(), 2.0);
  CHECK(weighting_error_terms(x, w, Ur).second == doctest::Approx(expected));
}

TEST_CASE("test weights come from the nearest training instance") {
  Matrix X(6, 1);
  X << 0, 10, 4, 20, 30, 6;
  Matrix Wm(6, 2);
  for (Index i = 0; i < 6; ++i) Wm.row(i) << 0.1 * static_cast<double>(i), 1.0 - 0.1 * static_cast<double>(i);
  const WeightMatrix W(Wm);
  CHECK(assign_test_weights(vec({10}), X, W).isApprox(W.row(1)));
  CHECK(assign_test_weights(vec({5}), X, W).isApprox(W.row(2)));

  std::mt19937_64 rng(27);
  const Matrix R = random_matrix(rng, 50, 3);
  for (int q = 0; q < 50; ++q) {
    const Vector x = random_vector(rng, 3);
    Index best = 0;
    for (Index i = 1; i < 50; ++i) {
      if ((R.row(i).transpose() - x).squaredNorm() < (R.row(best).transpose() - x).squaredNorm()) best = i;
    }
    CHECK(nearest_training_row(R, x) == best);
  }
  CHECK_THROWS_AS(assign_test_weights(vec({1}), Matrix(0, 1), WeightMatrix()), ContractError);
}
