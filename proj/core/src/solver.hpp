#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace hgtomo::detail {

/// f(X) = ½‖A(X) − P‖² over a closed convex set, given by callbacks.
struct ProjectedLeastSquares {
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> residual;          // A(X) − P
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> gradient_from_residual; // A*(R)
  std::function<void(Eigen::MatrixXd&)> project;
  double lipschitz_lower = 1.0;
  double lipschitz_upper = 1.0;
};

struct SolverOptions {
  int max_iterations = 1'000'000;
  bool backtracking = true;
  double tolerance = 1e-28;
  bool record_history = true;
};

struct SolverOutcome {
  Eigen::MatrixXd x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

/// Monotone FISTA with adaptive restart. The accepted iterate never increases
/// the objective; convergence is declared when a plain projected-gradient step
/// taken from the accepted iterate lowers the objective by less than
/// `tolerance`. A small extrapolated step (L/2·‖step‖² < tolerance) triggers
/// that check.
SolverOutcome minimize(const ProjectedLeastSquares& problem, Eigen::MatrixXd start, const SolverOptions& options);

} // namespace hgtomo::detail
