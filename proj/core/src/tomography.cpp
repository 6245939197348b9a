#include "hgtomo/tomography.hpp"

#include "hgtomo/errors.hpp"
#include "hgtomo/modes.hpp"
#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace hgtomo {

namespace {

// ln(exp(-δ²) |δ|^{k+p} / √(k! p!)); caller handles δ = 0 and the sign.
double log_design_entry(double d, int k, int p) {
  return (k + p) * std::log(std::abs(d)) - 0.5 * (log_factorial(k) + log_factorial(p)) - d * d;
}

double design_entry(double d, int k, int p) {
  if (d == 0.0) return (k == 0 && p == 0) ? 1.0 : 0.0;
  const double mag = std::exp(log_design_entry(d, k, p));
  return (d < 0.0 && (k + p) % 2 == 1) ? -mag : mag;
}

void check_displacements_match(const ProbabilityMatrix& p, const DesignMatrix& f) {
  if (p.probes() != f.values.rows()) {
    throw ValidationError("probability rows (" + std::to_string(p.probes()) + ") do not match design rows (" +
                          std::to_string(f.values.rows()) + ")");
  }
  for (std::size_t i = 0; i < p.displacements.size(); ++i) {
    if (std::abs(p.displacements[i] - f.displacements[i]) > 1e-12 * std::max(1.0, std::abs(f.displacements[i]))) {
      throw ValidationError("probability and design displacements differ at row " + std::to_string(i));
    }
  }
}

Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Columns of `v` (M²×N) as M×M matrices and back.
Eigen::MatrixXd unvec(const Eigen::MatrixXd& v, Eigen::Index col, int m) {
  return Eigen::Map<const Eigen::MatrixXd>(v.col(col).data(), m, m);
}

// Dykstra's alternating projection onto {Π_n ⪰ 0} ∩ {Σ_n Π_n = 1}.
void project_to_povm(Eigen::MatrixXd& v, int m, double tolerance) {
  const Eigen::Index outcomes = v.cols();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd x = v;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(v.rows(), outcomes);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(v.rows(), outcomes);
  for (int it = 0; it < 5000; ++it) {
    // PSD cone, element by element.
    Eigen::MatrixXd y(v.rows(), outcomes);
    for (Eigen::Index n = 0; n < outcomes; ++n) {
      const Eigen::MatrixXd a = symmetric_part(unvec(x + p, n, m));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
      const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
      const Eigen::MatrixXd psd = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
      y.col(n) = Eigen::Map<const Eigen::VectorXd>(psd.data(), m * m);
    }
    p = x + p - y;
    // Affine completeness constraint.
    Eigen::MatrixXd w = y + q;
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index n = 0; n < outcomes; ++n) total += unvec(w, n, m);
    const Eigen::MatrixXd excess = (total - identity) / static_cast<double>(outcomes);
    const Eigen::VectorXd excess_vec = Eigen::Map<const Eigen::VectorXd>(excess.data(), m * m);
    Eigen::MatrixXd x_next = w;
    for (Eigen::Index n = 0; n < outcomes; ++n) x_next.col(n) -= excess_vec;
    q = w - x_next;
    const double change = (x_next - x).cwiseAbs().maxCoeff();
    x = std::move(x_next);
    if (change < tolerance) break;
  }
  v = std::move(x);
}

void require_diagonal(const PovmSet& povm, const char* what) {
  if (povm.model != PovmModel::diagonal) throw ValidationError(std::string(what) + " requires the diagonal model");
}

} // namespace

double DesignMatrix::condition_number() const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(values);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smallest = s(s.size() - 1);
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

DesignMatrix build_design_matrix(std::span<const double> displacements, int basis_size, PovmModel model) {
  if (displacements.empty()) throw ValidationError("design matrix needs at least one displacement");
  if (basis_size < 1) throw ValidationError("basis size must be at least 1");
  DesignMatrix f;
  f.model = model;
  f.basis_size = basis_size;
  f.displacements.assign(displacements.begin(), displacements.end());
  const auto rows = static_cast<Eigen::Index>(displacements.size());
  if (model == PovmModel::diagonal) {
    f.values.resize(rows, basis_size);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (int k = 0; k < basis_size; ++k) f.values(i, k) = design_entry(displacements[static_cast<std::size_t>(i)], k, k);
    }
  } else {
    f.values.resize(rows, static_cast<Eigen::Index>(basis_size) * basis_size);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (int k = 0; k < basis_size; ++k) {
        for (int p = 0; p < basis_size; ++p) {
          f.values(i, static_cast<Eigen::Index>(k) * basis_size + p) =
              design_entry(displacements[static_cast<std::size_t>(i)], k, p);
        }
      }
    }
  }
  return f;
}

int PovmSet::outcomes() const {
  return model == PovmModel::diagonal ? static_cast<int>(theta.rows()) : static_cast<int>(elements.size());
}

int PovmSet::basis_size() const {
  if (model == PovmModel::diagonal) return static_cast<int>(theta.cols());
  return elements.empty() ? 0 : static_cast<int>(elements.front().rows());
}

Eigen::MatrixXd PovmSet::diagonal_part() const {
  if (model == PovmModel::diagonal) return theta;
  Eigen::MatrixXd d(outcomes(), basis_size());
  for (int n = 0; n < outcomes(); ++n) d.row(n) = elements[static_cast<std::size_t>(n)].diagonal().transpose();
  return d;
}

double PovmSet::completeness_error() const {
  if (model == PovmModel::diagonal) {
    if (theta.size() == 0) return 0.0;
    return (theta.colwise().sum().array() - 1.0).abs().maxCoeff();
  }
  const int m = basis_size();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(m, m);
  for (const auto& e : elements) total += e;
  return (total - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
}

double PovmSet::positivity_violation() const {
  double worst = 0.0;
  if (model == PovmModel::diagonal) {
    if (theta.size() > 0) worst = std::max(0.0, -theta.minCoeff());
    return worst;
  }
  for (const auto& e : elements) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric_part(e), Eigen::EigenvaluesOnly);
    worst = std::max(worst, -eig.eigenvalues().minCoeff());
  }
  return worst;
}

PureState::PureState(Eigen::VectorXcd coefficients) : c_(std::move(coefficients)) {
  if (c_.size() == 0) throw ValidationError("pure state needs at least one coefficient");
  if (std::abs(c_.squaredNorm() - 1.0) > 1e-9) throw ValidationError("pure state is not normalized");
}

PureState PureState::basis(int basis_size, int k) {
  if (basis_size < 1 || k < 0 || k >= basis_size) throw BoundsError("basis index out of range");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis_size);
  c(k) = 1.0;
  return PureState(std::move(c));
}

void ReconstructionConfig::validate(int outcomes) const {
  if (basis_size < 1) throw ValidationError("basis size must be at least 1");
  if (basis_size < outcomes) {
    throw ValidationError("basis size M=" + std::to_string(basis_size) + " is smaller than the number of detectors N=" +
                          std::to_string(outcomes));
  }
  if (max_iterations < 1) throw ValidationError("max_iterations must be positive");
  if (!(tolerance > 0.0) || !(constraint_tolerance > 0.0)) throw ValidationError("tolerances must be positive");
}

void project_to_simplex(std::span<double> v) {
  if (v.empty()) return;
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) tau = candidate;
  }
  for (auto& x : v) x = std::max(x - tau, 0.0);
}

ReconstructionResult reconstruct(const ProbabilityMatrix& p, const DesignMatrix& f, const ReconstructionConfig& cfg) {
  p.validate();
  const int outcomes = static_cast<int>(p.detectors());
  cfg.validate(outcomes);
  if (f.model != cfg.model) throw ValidationError("design matrix model does not match reconstruction model");
  if (f.basis_size != cfg.basis_size) throw ValidationError("design matrix basis size does not match configuration");
  check_displacements_match(p, f);

  const int m = cfg.basis_size;
  const Eigen::MatrixXd& design = f.values;
  const Eigen::MatrixXd& data = p.values;
  const Eigen::MatrixXd gram = design.transpose() * design;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(gram, Eigen::EigenvaluesOnly);

  detail::ProjectedLeastSquares problem;
  problem.lipschitz_upper = std::max(gram_eig.eigenvalues().maxCoeff(), std::numeric_limits<double>::min());
  problem.lipschitz_lower = std::max(gram.trace() / static_cast<double>(gram.rows()), std::numeric_limits<double>::min());
  problem.lipschitz_lower = std::min(problem.lipschitz_lower, problem.lipschitz_upper);

  Eigen::MatrixXd start;
  if (cfg.model == PovmModel::diagonal) {
    // x is N×M (row n = θ⁽ⁿ⁾); the model is P̂ = F xᵀ.
    problem.residual = [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return design * x.transpose() - data; };
    problem.gradient_from_residual = [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd { return r.transpose() * design; };
    problem.project = [](Eigen::MatrixXd& x) {
      Eigen::VectorXd column(x.rows());
      for (Eigen::Index k = 0; k < x.cols(); ++k) {
        column = x.col(k);
        project_to_simplex(std::span<double>(column.data(), static_cast<std::size_t>(column.size())));
        x.col(k) = column;
      }
    };
    start = Eigen::MatrixXd::Constant(outcomes, m, 1.0 / outcomes);
  } else {
    // x is M²×N (column n = vec Π_n); the model is P̂ = F x.
    problem.residual = [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return design * x - data; };
    problem.gradient_from_residual = [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd { return design.transpose() * r; };
    problem.project = [m, tol = cfg.constraint_tolerance](Eigen::MatrixXd& x) { project_to_povm(x, m, tol); };
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(m, m) / outcomes;
    start.resize(static_cast<Eigen::Index>(m) * m, outcomes);
    for (int n = 0; n < outcomes; ++n) start.col(n) = Eigen::Map<const Eigen::VectorXd>(identity.data(), m * m);
  }

  detail::SolverOptions options;
  options.max_iterations = cfg.max_iterations;
  options.backtracking = cfg.step_rule == StepRule::backtracking;
  options.tolerance = cfg.tolerance;
  options.record_history = cfg.record_history;
  auto outcome = detail::minimize(problem, std::move(start), options);

  ReconstructionResult result;
  result.converged = outcome.converged;
  result.iterations = outcome.iterations;
  result.objective = outcome.objective;
  result.residual_norm = std::sqrt(2.0 * outcome.objective);
  result.objective_history = std::move(outcome.history);
  result.povm.model = cfg.model;
  if (cfg.model == PovmModel::diagonal) {
    result.povm.theta = std::move(outcome.x);
    result.condition_number = f.condition_number();
    if (result.condition_number > 1e8) {
      std::ostringstream msg;
      msg << "design matrix is ill-conditioned (condition number " << result.condition_number
          << "); widen the displacement range or reduce the basis size";
      result.warnings.push_back(msg.str());
    }
  } else {
    for (int n = 0; n < outcomes; ++n) result.povm.elements.push_back(symmetric_part(unvec(outcome.x, n, m)));
    result.condition_number = std::numeric_limits<double>::infinity();
    result.warnings.emplace_back("full POVM model is experimental: displacement scans only constrain anti-diagonal sums");
  }
  if (!result.converged) {
    result.warnings.push_back("reconstruction stopped after " + std::to_string(result.iterations) +
                              " iterations without meeting the tolerance");
  }
  return result;
}

ProbabilityMatrix predict(const PovmSet& povm, const DesignMatrix& f) {
  if (povm.model != f.model) throw ValidationError("POVM and design matrix use different models");
  if (povm.basis_size() != f.basis_size) throw ValidationError("POVM basis size does not match design matrix");
  Eigen::MatrixXd values;
  if (povm.model == PovmModel::diagonal) {
    values = f.values * povm.theta.transpose();
  } else {
    const int m = f.basis_size;
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(m) * m, povm.outcomes());
    for (int n = 0; n < povm.outcomes(); ++n) {
      stacked.col(n) = Eigen::Map<const Eigen::VectorXd>(povm.elements[static_cast<std::size_t>(n)].data(), m * m);
    }
    values = f.values * stacked;
  }
  values = values.cwiseMax(0.0);
  return make_probability_matrix(std::move(values), f.displacements);
}

double born_probability(const PovmSet& povm, int n, const PureState& state) {
  if (n < 0 || n >= povm.outcomes()) throw ValidationError("POVM outcome index " + std::to_string(n) + " out of range");
  const auto& c = state.coefficients();
  if (c.size() != povm.basis_size()) throw ValidationError("state dimension does not match POVM basis");
  if (povm.model == PovmModel::diagonal) {
    return (povm.theta.row(n).transpose().array() * c.array().abs2()).sum();
  }
  const Eigen::MatrixXcd element = povm.elements[static_cast<std::size_t>(n)].cast<std::complex<double>>();
  return (c.adjoint() * element * c)(0, 0).real();
}

double r_squared(const Eigen::MatrixXd& p, const Eigen::MatrixXd& p_hat) {
  if (p.rows() != p_hat.rows() || p.cols() != p_hat.cols()) throw ValidationError("r_squared shape mismatch");
  if (p.size() < 2) throw UndefinedStatisticError("Pearson correlation needs at least two values");
  const double mean_a = p.mean();
  const double mean_b = p_hat.mean();
  const Eigen::ArrayXXd a = p.array() - mean_a;
  const Eigen::ArrayXXd b = p_hat.array() - mean_b;
  const double var_a = (a * a).sum();
  const double var_b = (b * b).sum();
  if (!(var_a > 0.0) || !(var_b > 0.0)) throw UndefinedStatisticError("Pearson correlation of a constant matrix");
  const double cov = (a * b).sum();
  return std::clamp(cov * cov / (var_a * var_b), 0.0, 1.0);
}

double r_squared(const ProbabilityMatrix& p, const ProbabilityMatrix& p_hat) { return r_squared(p.values, p_hat.values); }

double similarity(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& reference) {
  if (theta.rows() != reference.rows() || theta.cols() != reference.cols()) {
    throw ValidationError("similarity operands have different shapes");
  }
  constexpr double kNegativeSlack = 1e-12;
  if (theta.size() == 0) throw ValidationError("similarity of empty arrays");
  if (theta.minCoeff() < -kNegativeSlack || reference.minCoeff() < -kNegativeSlack) {
    throw ValidationError("similarity requires nonnegative coefficients");
  }
  const Eigen::ArrayXXd a = theta.array().max(0.0);
  const Eigen::ArrayXXd b = reference.array().max(0.0);
  const double sum_a = a.sum();
  const double sum_b = b.sum();
  if (!(sum_a > 0.0) || !(sum_b > 0.0)) throw ValidationError("similarity with an all-zero operand");
  const double cross = (a * b).sqrt().sum();
  return std::clamp(cross * cross / (sum_a * sum_b), 0.0, 1.0);
}

double similarity(const PovmSet& povm, const PovmSet& reference) {
  require_diagonal(povm, "similarity");
  require_diagonal(reference, "similarity");
  return similarity(povm.theta, reference.theta);
}

double similarity_to_ideal(const PovmSet& povm) {
  require_diagonal(povm, "similarity_to_ideal");
  const int n = povm.outcomes();
  if (povm.basis_size() < n) throw ValidationError("POVM basis smaller than the number of outcomes");
  return similarity(Eigen::MatrixXd(povm.theta.leftCols(n)), ideal_povm(n, n).theta);
}

PovmSet ideal_povm(int outcomes, int basis_size) {
  if (outcomes < 1) throw ValidationError("ideal POVM needs at least one outcome");
  if (basis_size < outcomes) throw ValidationError("ideal POVM requires M >= N");
  PovmSet povm;
  povm.model = PovmModel::diagonal;
  povm.theta = Eigen::MatrixXd::Zero(outcomes, basis_size);
  for (int n = 0; n < outcomes; ++n) povm.theta(n, n) = 1.0;
  povm.reference = true;
  return povm;
}

} // namespace hgtomo
