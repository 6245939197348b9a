#pragma once

#include "hgtomo/diffraction.hpp"
#include "hgtomo/modes.hpp"
#include "hgtomo/noise.hpp"
#include "hgtomo/probability_matrix.hpp"
#include "hgtomo/tomography.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hgtomo {

enum class SourceKind { simulate, analytic_ideal, file };

/// Everything one pipeline run needs. Omitted config keys keep these defaults.
struct RunConfig {
  ExperimentGeometry geometry;
  /// Dimensionless probe displacements δ_i (fiber waists).
  std::vector<double> displacements = uniform_displacements(-3.0, 3.0, 41);
  int detectors = 5;
  /// Basis truncation M; N + 4 when unset.
  std::optional<int> basis_size;
  Modulation modulation = Modulation::exact_amplitude;
  SimulationConfig simulation;
  SourceKind source = SourceKind::simulate;
  std::filesystem::path source_path;
  NoiseModel noise;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::per_mode;
  PovmModel model = PovmModel::diagonal;
  StepRule step_rule = StepRule::backtracking;
  int max_iterations = 1'000'000;
  double tolerance = 1e-28;
  double constraint_tolerance = 1e-10;
  std::filesystem::path output_dir = "hgtomo-out";
  bool export_masks = false;

  int effective_basis_size() const { return basis_size.value_or(detectors + 4); }
  ReconstructionConfig reconstruction() const;
  /// Throws ValidationError.
  void validate() const;

  static std::vector<double> uniform_displacements(double lo, double hi, int count);
};

/// YAML (or JSON) text; unknown keys are rejected. Throws ValidationError.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Complete config as JSON text; parse_run_config(config_echo(c)) == c.
std::string config_echo(const RunConfig& config);

/// Command-line spellings: phase|exact, simulate|ideal|file:<path>,
/// raw|per-mode|per-probe. Throw ValidationError.
Modulation parse_modulation(std::string_view text);
void parse_source(std::string_view text, RunConfig& config);
Normalization parse_normalization(std::string_view text);

std::string to_string(Modulation m);
std::string to_string(Normalization n);
/// simulate | ideal | file:<path>
std::string source_label(const RunConfig& config);

} // namespace hgtomo
