#pragma once

#include "hgtomo/probability_matrix.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace hgtomo {

/// diagonal: each POVM element is diagonal in the HG basis (θ⁽ⁿ⁾_k).
/// full: each element is a real symmetric M×M matrix. Displacement scans only
/// see the sums along anti-diagonals k + p, so the full model is not
/// identifiable from them and is offered as experimental.
enum class PovmModel { diagonal, full };

/// Response of basis state k (diagonal) or coherence (k, p) (full) to each
/// probe: F_{i,kp} = exp(-δ_i²) δ_i^{k+p} / √(k! p!), δ in waist units.
struct DesignMatrix {
  PovmModel model = PovmModel::diagonal;
  int basis_size = 0;
  std::vector<double> displacements;
  /// diagonal: D×M with F_{i,k} = exp(-δ²) δ^{2k}/k!.
  /// full: D×M² with column k·M + p.
  Eigen::MatrixXd values;

  /// σ_max/σ_min of `values` (infinity when rank deficient).
  double condition_number() const;
};

/// Throws ValidationError on an empty displacement list or basis_size < 1.
DesignMatrix build_design_matrix(std::span<const double> displacements, int basis_size,
                                 PovmModel model = PovmModel::diagonal);

/// Detector POVM in the HG basis.
struct PovmSet {
  PovmModel model = PovmModel::diagonal;
  /// diagonal model: N×M, row n is θ⁽ⁿ⁾.
  Eigen::MatrixXd theta;
  /// full model: N symmetric M×M matrices.
  std::vector<Eigen::MatrixXd> elements;
  /// Reference sets (ideal projectors truncated to N < M) are exempt from completeness.
  bool reference = false;

  int outcomes() const;
  int basis_size() const;
  /// θ⁽ⁿ⁾_kk as an N×M matrix for either model.
  Eigen::MatrixXd diagonal_part() const;
  /// max_k |Σ_n θ⁽ⁿ⁾_k − 1| (diagonal) or max |Σ_n Π_n − 1| entrywise (full).
  double completeness_error() const;
  /// Largest negative entry (diagonal) or eigenvalue (full) magnitude; 0 if none.
  double positivity_violation() const;
};

/// Pure input state Σ c_k |ψ_k⟩ with unit norm.
class PureState {
public:
  explicit PureState(Eigen::VectorXcd coefficients);
  static PureState basis(int basis_size, int k);

  const Eigen::VectorXcd& coefficients() const { return c_; }

private:
  Eigen::VectorXcd c_;
};

enum class StepRule {
  /// Lipschitz estimate grown by doubling until the sufficient-decrease test passes.
  backtracking,
  /// Exact Lipschitz constant λ_max(FᵀF).
  fixed,
};

struct ReconstructionConfig {
  int basis_size = 9;
  PovmModel model = PovmModel::diagonal;
  int max_iterations = 1'000'000;
  StepRule step_rule = StepRule::backtracking;
  /// Stop once a projected-gradient step from the current iterate would lower
  /// ½‖P − FΠ‖² by less than this.
  double tolerance = 1e-28;
  /// Feasibility target of the full-model POVM projection.
  double constraint_tolerance = 1e-10;
  bool record_history = true;

  void validate(int outcomes) const;
};

struct ReconstructionResult {
  PovmSet povm;
  bool converged = false;
  int iterations = 0;
  /// Final ½‖P − FΠ‖².
  double objective = 0.0;
  /// Final ‖P − FΠ‖ (Frobenius).
  double residual_norm = 0.0;
  /// Objective after every iteration, starting with the initial point.
  std::vector<double> objective_history;
  double condition_number = 0.0;
  std::vector<std::string> warnings;
};

/// Constrained least squares: min ‖P − FΠ‖ with Π_n ⪰ 0 and Σ_n Π_n = 1, by
/// monotone accelerated projected gradient from the uniform point Π_n = 1/N.
/// Non-convergence is reported through `converged`, not by throwing.
ReconstructionResult reconstruct(const ProbabilityMatrix& p, const DesignMatrix& f, const ReconstructionConfig& cfg);

/// Forward model P̂ = FΠ (entries clamped at 0 against rounding).
ProbabilityMatrix predict(const PovmSet& povm, const DesignMatrix& f);

/// Tr(ρ Π_n) for ρ = |c⟩⟨c|.
double born_probability(const PovmSet& povm, int n, const PureState& state);

/// Squared Pearson correlation between the flattened entries.
double r_squared(const Eigen::MatrixXd& p, const Eigen::MatrixXd& p_hat);
double r_squared(const ProbabilityMatrix& p, const ProbabilityMatrix& p_hat);

/// (Σ √(θ θ̃))² / (Σθ · Σθ̃) over matching diagonal-model arrays.
double similarity(const PovmSet& povm, const PovmSet& reference);
double similarity(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& reference);

/// Similarity of the N×N block θ⁽ⁿ⁾_k, k < N, against δ_nk.
double similarity_to_ideal(const PovmSet& povm);

/// θ⁽ⁿ⁾_k = δ_nk, flagged as a reference set. Requires M >= N.
PovmSet ideal_povm(int outcomes, int basis_size);

/// Euclidean projection onto the probability simplex {v >= 0, Σ v = 1}
/// (sort-based, O(n log n)).
void project_to_simplex(std::span<double> v);

} // namespace hgtomo
