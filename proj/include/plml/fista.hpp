#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "plml/types.hpp"

namespace plml {

struct FistaOptions {
  double tol = 1e-5;
  int max_iter = 1000;
  double initial_beta = 1.0;
  int max_doublings = 200;  // per iteration, before declaring a solver failure
};

/// A smooth objective over a closed convex set, given by its value, gradient
/// and Euclidean projection.
struct SmoothProblem {
  std::function<double(const Matrix&)> value;
  /// Writes the gradient into the second argument and returns the value.
  std::function<double(const Matrix&, Matrix&)> value_and_gradient;
  std::function<Matrix(const Matrix&)> project;
};

/// Snapshot handed to observers after each accepted step.
struct FistaState {
  int iteration = 0;
  const Matrix* iterate = nullptr;   // W^i
  const Matrix* momentum = nullptr;  // Y^{i+1}
  double t = 1.0;                    // t_{i+1}
  double beta = 1.0;
  double objective = 0.0;
  double residual = 0.0;
};

struct FistaTraceRow {
  int iteration;
  double objective;
  double beta;
  double residual;
};

struct FistaResult {
  Matrix solution;
  double objective = 0.0;
  double initial_objective = 0.0;
  double residual = 0.0;
  double beta = 1.0;
  int iterations = 0;
  bool converged = false;
  std::vector<FistaTraceRow> trace;
};

using FistaObserver = std::function<void(const FistaState&)>;

/// Next momentum scalar: (1 + sqrt(1 + 4 t^2)) / 2.
double fista_next_t(double t);

/// Projected-gradient residual ||x - P(x - g / beta)||_F / max(1, ||x||_F).
double projected_gradient_residual(const SmoothProblem& problem, const Matrix& x, const Matrix& grad,
                                   double beta);

/// Accelerated projected gradient with backtracking on the Lipschitz estimate.
/// beta starts at options.initial_beta and doubles until
/// f(W) <= f(Y) + <grad f(Y), W - Y> + beta/2 ||W - Y||^2; it never decreases.
/// Stops when the projected-gradient residual at W drops to options.tol.
/// Without convergence the lowest-objective iterate is returned.
FistaResult fista_minimize(const SmoothProblem& problem, const Matrix& x0, const FistaOptions& options,
                           const FistaObserver& observer = {});

void write_trace_csv(std::ostream& os, const std::vector<FistaTraceRow>& trace);

}  // namespace plml
