#include "plml/fista.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "plml/error.hpp"

namespace plml {
namespace {

void check_finite(double v, int iteration, const char* what) {
  if (std::isfinite(v)) return;
  std::ostringstream os;
  os << "non-finite " << what << " at iteration " << iteration;
  throw SolverError(os.str());
}

}  // namespace

double fista_next_t(double t) { return (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0; }

double projected_gradient_residual(const SmoothProblem& problem, const Matrix& x, const Matrix& grad,
                                   double beta) {
  const Matrix step = problem.project(x - grad / beta);
  return (x - step).norm() / std::max(1.0, x.norm());
}

FistaResult fista_minimize(const SmoothProblem& problem, const Matrix& x0, const FistaOptions& options,
                           const FistaObserver& observer) {
  require(options.initial_beta > 0.0, "fista: initial beta must be positive");
  FistaResult result;

  Matrix grad_x(x0.rows(), x0.cols());
  const double f0 = problem.value_and_gradient(x0, grad_x);
  check_finite(f0, 0, "objective");
  result.initial_objective = f0;

  double beta = options.initial_beta;
  double t = 1.0;
  Matrix w_prev = x0;
  Matrix y = x0;
  Matrix grad_y(x0.rows(), x0.cols());

  Matrix best = x0;
  double best_f = f0;
  double residual = projected_gradient_residual(problem, x0, grad_x, beta);
  Matrix w = x0;
  double f_w = f0;

  if (residual <= options.tol) {
    result.solution = x0;
    result.objective = f0;
    result.residual = residual;
    result.beta = beta;
    result.converged = true;
    return result;
  }

  for (int it = 1; it <= options.max_iter; ++it) {
    const double f_y = problem.value_and_gradient(y, grad_y);
    check_finite(f_y, it, "objective");
    // Rounding slack keeps the test from failing on ties near convergence.
    const double slack = 1e-12 * std::max(1.0, std::abs(f_y));

    int doublings = 0;
    for (;;) {
      w = problem.project(y - grad_y / beta);
      const Matrix diff = w - y;
      f_w = problem.value(w);
      check_finite(f_w, it, "objective");
      const double model = f_y + (grad_y.array() * diff.array()).sum() + 0.5 * beta * diff.squaredNorm();
      if (f_w <= model + slack) break;
      beta *= 2.0;
      if (++doublings > options.max_doublings) {
        std::ostringstream os;
        os << "backtracking did not terminate at iteration " << it << " (beta = " << beta << ")";
        throw SolverError(os.str());
      }
    }

    const double t_next = fista_next_t(t);
    Matrix y_next = w + ((t - 1.0) / t_next) * (w - w_prev);

    Matrix grad_w(w.rows(), w.cols());
    problem.value_and_gradient(w, grad_w);
    residual = projected_gradient_residual(problem, w, grad_w, beta);

    if (f_w < best_f) {
      best = w;
      best_f = f_w;
    }
    result.trace.push_back({it, f_w, beta, residual});
    result.iterations = it;

    if (observer) {
      FistaState state;
      state.iteration = it;
      state.iterate = &w;
      state.momentum = &y_next;
      state.t = t_next;
      state.beta = beta;
      state.objective = f_w;
      state.residual = residual;
      observer(state);
    }

    if (residual <= options.tol) {
      result.converged = true;
      break;
    }
    w_prev = w;
    y = std::move(y_next);
    t = t_next;
  }

  result.beta = beta;
  if (result.converged && f_w <= f0) {
    result.solution = std::move(w);
    result.objective = f_w;
    result.residual = residual;
  } else {
    result.solution = std::move(best);
    result.objective = best_f;
    Matrix g(result.solution.rows(), result.solution.cols());
    problem.value_and_gradient(result.solution, g);
    result.residual = projected_gradient_residual(problem, result.solution, g, beta);
  }
  return result;
}

void write_trace_csv(std::ostream& os, const std::vector<FistaTraceRow>& trace) {
  os << "iteration,objective,beta,residual\n";
  os.precision(17);
  for (const auto& r : trace) os << r.iteration << ',' << r.objective << ',' << r.beta << ',' << r.residual << '\n';
}

}  // namespace plml
