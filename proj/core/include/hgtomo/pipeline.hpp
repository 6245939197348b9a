#pragma once

#include "hgtomo/probability_matrix.hpp"
#include "hgtomo/run_config.hpp"
#include "hgtomo/tomography.hpp"

#include <string>
#include <vector>

namespace hgtomo {

/// Library version string.
const char* version();

struct RunReport {
  /// Data after noise, before normalization.
  ProbabilityMatrix data;
  ProbabilityMatrix normalized;
  /// FΠ̂ and FΠ_ideal, both labelled like `data` and normalized the same way.
  ProbabilityMatrix predicted;
  ProbabilityMatrix theory;
  ReconstructionResult reconstruction;
  double r2_reconstructed = 0.0;
  double r2_theory = 0.0;
  /// On the N×N block θ⁽ⁿ⁾_k, k < N.
  double similarity_to_ideal = 0.0;
  /// Σ_{k≠n} θ⁽ⁿ⁾_k per detector.
  std::vector<double> off_diagonal_mass;
  /// Diffracted power relative to the n = 0 detector (simulate source only).
  std::vector<double> efficiencies;
  std::string config_echo;
  std::uint64_t seed = 0;
};

/// source → noise → normalize → reconstruct → metrics. Deterministic in
/// (config, seed). Throws ValidationError / IoError / ParseError.
RunReport run(const RunConfig& config);

/// Versioned JSON report (schema_version 1).
std::string report_json(const RunReport& report);

/// probabilities.csv, normalized.csv, predicted.csv, theory.csv, povm.csv,
/// report.json, and masks/mask_n<k>.pgm when export_masks is set.
void write_artifacts(const RunReport& report, const RunConfig& config);

} // namespace hgtomo
