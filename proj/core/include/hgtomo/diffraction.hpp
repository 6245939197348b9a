#pragma once

#include "hgtomo/field_grid.hpp"
#include "hgtomo/hologram.hpp"
#include "hgtomo/modes.hpp"
#include "hgtomo/probability_matrix.hpp"

#include <optional>
#include <vector>

namespace hgtomo {

/// Focal-plane field of a lens. `field` is sampled in focal-plane length
/// units, x_f = λ f k / 2π, so its pitch is λ f / (nx·dx) of the source grid.
struct FarField {
  FieldGrid field;
  double dkx = 0.0;
  double dky = 0.0;
  ExperimentGeometry geometry;
  /// Power of the hologram-plane field this far field was computed from.
  double source_power = 0.0;

  double power() const { return field.power(); }
};

/// Centred DFT of `input`, scaled so that total power is preserved.
FarField far_field(const FieldGrid& input, const ExperimentGeometry& geometry);

/// Window of half-width π/Λ around the first-order carrier k = 2π/Λ (along x,
/// and around k_y = 0), moved to zero frequency. Everything else is zeroed.
/// `hologram_grid` is the grid the grating was written on.
FarField extract_first_order(const FarField& ff, const GratingSpec& grating, const GridGeometry& hologram_grid);

/// |⟨fiber(δ·w_f), ff⟩|² / source_power: coupling of the far field into the
/// fiber mode displaced by δ fiber waists along x.
double detection_probability(const FarField& ff, double displacement, const ExperimentGeometry& geometry);

/// |⟨HG_{m0}(w_f), ff⟩|² / source_power: coupling into a centred HG mode of
/// the fiber waist, i.e. the response of the detector to input mode m.
double mode_probability(const FarField& ff, int mode_order, const ExperimentGeometry& geometry);

/// Numerical parameters of the hologram-plane simulation.
struct SimulationConfig {
  int grid_size = 1024;
  /// Illumination waist in pixels; sets the SLM pixel pitch.
  double waist_pixels = 64.0;
  double grating_period_pixels = 8.0;
  /// Aperture (in illumination waists) over which detection targets are normalized.
  double aperture_radius = 2.5;
  /// Hologram-plane illumination waist; defaults to the fiber-matched λf/(π w_f).
  std::optional<double> input_waist;

  void validate() const;
  double illumination_waist(const ExperimentGeometry& geometry) const;
  GridGeometry grid(const ExperimentGeometry& geometry) const;
};

/// One-dimensional probe scan over a set of HG_{n0} detectors.
struct ScanConfig {
  std::vector<double> displacements;
  std::vector<int> detector_modes;
  Modulation modulation = Modulation::exact_amplitude;
  SimulationConfig simulation;

  /// D >= 2, strictly increasing displacements, N >= 1, nonnegative orders.
  void validate() const;
};

/// Everything one simulated detector needs: its mask, the first-order far
/// field of the illuminating Gaussian, and its diffracted power fraction.
struct DetectorResponse {
  HologramMask mask;
  FarField first_order;
  double first_order_fraction;
};

DetectorResponse simulate_detector(int mode_order, Modulation modulation, const ExperimentGeometry& geometry,
                                   const SimulationConfig& simulation);

/// D×N raw detection probabilities (relative to input power); `mode_power`
/// holds each detector's first-order power fraction. Detectors run in parallel.
ProbabilityMatrix simulate_scan(const ScanConfig& config, const ExperimentGeometry& geometry);

/// First-order power over input power for a Gaussian probe through the mode
/// `mode_order` hologram, divided by the same ratio for the n = 0 hologram.
double diffraction_efficiency(int mode_order, Modulation modulation, const ExperimentGeometry& geometry,
                              const SimulationConfig& simulation = {});

} // namespace hgtomo
