#include "solver.hpp"

#include <cmath>

namespace hgtomo::detail {

namespace {
double half_squared_norm(const Eigen::MatrixXd& r) { return 0.5 * r.squaredNorm(); }
} // namespace

SolverOutcome minimize(const ProjectedLeastSquares& problem, Eigen::MatrixXd start, const SolverOptions& options) {
  SolverOutcome out;
  problem.project(start);
  Eigen::MatrixXd x = std::move(start);
  double fx = half_squared_norm(problem.residual(x));
  Eigen::MatrixXd y = x;
  bool y_is_x = true;
  double t = 1.0;
  double lipschitz = options.backtracking ? problem.lipschitz_lower : problem.lipschitz_upper;
  if (options.record_history) out.history.push_back(fx);

  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXd ry = problem.residual(y);
    const double fy = half_squared_norm(ry);
    const Eigen::MatrixXd grad = problem.gradient_from_residual(ry);

    Eigen::MatrixXd z;
    Eigen::MatrixXd step;
    double fz = 0.0;
    for (;;) {
      z = y - grad / lipschitz;
      problem.project(z);
      step = z - y;
      fz = half_squared_norm(problem.residual(z));
      if (!options.backtracking || lipschitz >= problem.lipschitz_upper) break;
      const double model = fy + (grad.array() * step.array()).sum() + 0.5 * lipschitz * step.squaredNorm();
      if (fz <= model + 1e-14 * std::abs(fy)) break;
      lipschitz = std::min(2.0 * lipschitz, problem.lipschitz_upper);
    }
    const double predicted_decrease = 0.5 * lipschitz * step.squaredNorm();

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const bool improved = fz <= fx;
    Eigen::MatrixXd x_next = improved ? z : x;
    const double fx_next = improved ? fz : fx;

    const bool restart = !improved || ((y - z).array() * (z - x).array()).sum() > 0.0;
    if (restart) {
      y = x_next;
      t = 1.0;
    } else {
      y = x_next + (t / t_next) * (z - x_next) + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    const bool evaluated_at_accepted = y_is_x;
    const double decrease = fx - fz;
    y_is_x = restart;
    x = std::move(x_next);
    fx = fx_next;
    if (options.record_history) out.history.push_back(fx);
    out.iterations = it;

    if (evaluated_at_accepted && decrease < options.tolerance) {
      // A plain projected-gradient step from the accepted point no longer pays.
      out.converged = true;
      break;
    }
    if (predicted_decrease < options.tolerance) {
      // Stationarity was measured at the extrapolated point; confirm it at x.
      y = x;
      y_is_x = true;
      t = 1.0;
    }
  }
  out.x = std::move(x);
  out.objective = fx;
  return out;
}

} // namespace hgtomo::detail
