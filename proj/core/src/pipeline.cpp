#include "hgtomo/pipeline.hpp"

#include "hgtomo/errors.hpp"
#include "hgtomo/hologram.hpp"
#include "hgtomo/io.hpp"
#include "hgtomo/noise.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#ifndef HGTOMO_VERSION
#define HGTOMO_VERSION "unknown"
#endif

namespace hgtomo {

namespace {

using Json = nlohmann::ordered_json;

ProbabilityMatrix acquire(const RunConfig& config) {
  std::vector<int> modes(static_cast<std::size_t>(config.detectors));
  std::iota(modes.begin(), modes.end(), 0);
  switch (config.source) {
  case SourceKind::simulate: {
    ScanConfig scan;
    scan.displacements = config.displacements;
    scan.detector_modes = modes;
    scan.modulation = config.modulation;
    scan.simulation = config.simulation;
    return simulate_scan(scan, config.geometry);
  }
  case SourceKind::analytic_ideal: {
    Eigen::MatrixXd values(static_cast<Eigen::Index>(config.displacements.size()), config.detectors);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      for (int n = 0; n < config.detectors; ++n) {
        values(i, n) = ideal_probability(n, config.displacements[static_cast<std::size_t>(i)], 1.0);
      }
    }
    ProbabilityMatrix p = make_probability_matrix(std::move(values), config.displacements);
    p.mode_power.assign(modes.size(), 1.0);
    return p;
  }
  case SourceKind::file:
    break;
  }
  return read_probability_csv(config.source_path);
}

ProbabilityMatrix relabel(ProbabilityMatrix p, const ProbabilityMatrix& like) {
  p.modes = like.modes;
  p.normalization = like.normalization;
  p.mode_power = like.mode_power;
  return p;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv(const ProbabilityMatrix& p) {
  std::ostringstream out;
  write_probability_csv(p, out);
  return out.str();
}

} // namespace

const char* version() { return HGTOMO_VERSION; }

RunReport run(const RunConfig& config) {
  config.validate();
  RunReport report;
  report.seed = config.seed;
  report.config_echo = config_echo(config);

  ProbabilityMatrix raw = acquire(config);
  raw.normalization = Normalization::raw;
  raw.validate();
  const int outcomes = static_cast<int>(raw.detectors());
  const ReconstructionConfig rc = config.reconstruction();
  rc.validate(outcomes);

  report.data = add_noise(raw, config.noise, config.seed);
  report.normalized = normalize(report.data, config.normalization);

  const DesignMatrix f = build_design_matrix(report.data.displacements, rc.basis_size, rc.model);
  report.reconstruction = reconstruct(report.normalized, f, rc);
  report.predicted = relabel(predict(report.reconstruction.povm, f), report.normalized);

  // Theory uses the same scheme; an ideal detector has unit diffracted power.
  const DesignMatrix f_diag = build_design_matrix(report.data.displacements, rc.basis_size, PovmModel::diagonal);
  ProbabilityMatrix theory = predict(ideal_povm(outcomes, rc.basis_size), f_diag);
  theory.modes = report.data.modes;
  if (!report.data.mode_power.empty()) theory.mode_power.assign(report.data.mode_power.size(), 1.0);
  report.theory = normalize(theory, config.normalization);

  report.r2_reconstructed = r_squared(report.normalized, report.predicted);
  report.r2_theory = r_squared(report.normalized, report.theory);

  const Eigen::MatrixXd theta = report.reconstruction.povm.diagonal_part();
  PovmSet diag;
  diag.theta = theta;
  report.similarity_to_ideal = similarity_to_ideal(diag);
  for (Eigen::Index n = 0; n < theta.rows(); ++n) {
    report.off_diagonal_mass.push_back(theta.row(n).sum() - theta(n, n));
  }

  if (config.source == SourceKind::simulate) {
    const auto& power = report.data.mode_power;
    const auto zero = std::find(report.data.modes.begin(), report.data.modes.end(), 0);
    if (zero != report.data.modes.end()) {
      const double reference = power[static_cast<std::size_t>(zero - report.data.modes.begin())];
      for (std::size_t c = 0; c < power.size(); ++c) {
        report.efficiencies.push_back(report.data.modes[c] == 0 ? 1.0 : power[c] / reference);
      }
    }
  }
  return report;
}

std::string report_json(const RunReport& r) {
  Json j;
  j["schema_version"] = 1;
  j["tool_version"] = version();
  j["seed"] = r.seed;
  j["modes"] = r.data.modes;
  j["displacements"] = r.data.displacements;
  j["theta"] = matrix_json(r.reconstruction.povm.diagonal_part());
  j["converged"] = r.reconstruction.converged;
  j["iterations"] = r.reconstruction.iterations;
  j["objective"] = r.reconstruction.objective;
  j["residual_norm"] = r.reconstruction.residual_norm;
  j["completeness_error"] = r.reconstruction.povm.completeness_error();
  j["positivity_violation"] = r.reconstruction.povm.positivity_violation();
  j["condition_number"] = std::isfinite(r.reconstruction.condition_number) ? Json(r.reconstruction.condition_number)
                                                                            : Json(nullptr);
  j["r2_reconstructed"] = r.r2_reconstructed;
  j["r2_theory"] = r.r2_theory;
  j["similarity_to_ideal"] = r.similarity_to_ideal;
  j["off_diagonal_mass"] = r.off_diagonal_mass;
  j["diffraction_efficiency"] = r.efficiencies;
  j["warnings"] = r.reconstruction.warnings;
  j["config"] = Json::parse(r.config_echo);
  return j.dump(2) + "\n";
}

void write_artifacts(const RunReport& report, const RunConfig& config) {
  const auto& dir = config.output_dir;
  write_text_file(dir / "probabilities.csv", csv(report.data));
  write_text_file(dir / "normalized.csv", csv(report.normalized));
  write_text_file(dir / "predicted.csv", csv(report.predicted));
  write_text_file(dir / "theory.csv", csv(report.theory));
  std::ostringstream povm;
  write_povm_csv(report.reconstruction.povm, report.data.modes, povm);
  write_text_file(dir / "povm.csv", povm.str());
  write_text_file(dir / "report.json", report_json(report));

  if (config.export_masks && config.source == SourceKind::simulate) {
    const double waist = config.simulation.illumination_waist(config.geometry);
    const GridGeometry grid = config.simulation.grid(config.geometry);
    const GratingSpec grating = GratingSpec::pixels(config.simulation.grating_period_pixels, grid.dx, config.modulation);
    for (int n : report.data.modes) {
      const HologramMask mask =
          synthesize_mask(detection_target(n, waist, grid, config.simulation.aperture_radius), grating);
      std::ostringstream pgm;
      write_pgm(mask, pgm);
      write_text_file(dir / "masks" / ("mask_n" + std::to_string(n) + ".pgm"), pgm.str());
    }
  }
}

} // namespace hgtomo
