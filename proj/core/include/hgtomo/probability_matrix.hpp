#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hgtomo {

enum class Normalization { raw, per_mode, per_probe };

/// D×N detection probabilities: row i is the probe at dimensionless
/// displacement δ_i (units of the fiber waist), column n the detector tuned
/// to HG mode `modes[n]`.
///
/// `mode_power`, when present, holds each detector's total first-order
/// (diffracted) power relative to the input beam. per_mode normalization
/// divides by it; without it the column sum over probes is used instead.
struct ProbabilityMatrix {
  Eigen::MatrixXd values;
  std::vector<double> displacements;
  std::vector<int> modes;
  Normalization normalization = Normalization::raw;
  std::vector<double> mode_power;

  Eigen::Index probes() const { return values.rows(); }
  Eigen::Index detectors() const { return values.cols(); }

  /// Shape consistency, nonnegative finite entries, and the invariant of the
  /// normalization tag. Throws ValidationError.
  void validate() const;
};

/// Labels columns 0..N-1 and leaves mode_power empty.
ProbabilityMatrix make_probability_matrix(Eigen::MatrixXd values, std::vector<double> displacements);

/// Apply a normalization scheme to raw data. Normalizing already-normalized
/// data with the same tag is a no-op; any other conversion requires raw input.
ProbabilityMatrix normalize(const ProbabilityMatrix& p, Normalization scheme);

} // namespace hgtomo
