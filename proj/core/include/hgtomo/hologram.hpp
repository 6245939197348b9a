#pragma once

#include "hgtomo/field_grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace hgtomo {

enum class Modulation { phase_only, exact_amplitude };

/// Blazed grating along x. `period` is in length units and must span at
/// least four pixels of the grid the mask is written on.
struct GratingSpec {
  double period = 0.0;
  Modulation modulation = Modulation::exact_amplitude;

  void validate(const GridGeometry& grid) const;
  static GratingSpec pixels(double period_pixels, double dx, Modulation modulation) {
    return {period_pixels * dx, modulation};
  }
};

/// Desired first-order output A·exp(iΦ) with max A == 1.
struct TargetField {
  GridGeometry grid;
  std::vector<double> amplitude;
  std::vector<double> phase;

  /// Throws ValidationError on size mismatch, A outside [0, 1], or max A != 1.
  void validate() const;

  /// Target from an arbitrary complex field: A = |E|/max|E|, Φ = arg E.
  static TargetField from_field(const FieldGrid& field);
};

/// Per-pixel SLM phase in [0, 2π).
class HologramMask {
public:
  HologramMask(const GridGeometry& grid, GratingSpec grating, std::vector<double> phase);

  const GridGeometry& grid() const { return grid_; }
  const GratingSpec& grating() const { return grating_; }
  std::span<const double> phase() const { return phase_; }
  double operator()(int i, int j) const {
    return phase_[static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.nx) + static_cast<std::size_t>(i)];
  }

private:
  GridGeometry grid_;
  GratingSpec grating_;
  std::vector<double> phase_;
};

/// Unnormalized sinc, sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// x mod 2π folded into [0, 2π).
double wrap_phase(double x);

/// Grating modulation depth M and phase offset F for one pixel.
struct MaskTerms {
  double depth;
  double offset;
};

/// exact_amplitude: M = sinc(π(A − 1)), F = Φ − πA. phase_only: M = 1, F = Φ.
MaskTerms mask_terms(double amplitude, double phase, Modulation modulation);

/// φ(x, y) = M · mod_2π(F + 2πx/Λ).
HologramMask synthesize_mask(const TargetField& target, const GratingSpec& grating);

/// Pixelwise input · exp(iφ).
FieldGrid apply_mask(const FieldGrid& input, const HologramMask& mask);

/// Target for a detector of HG_{n0} illuminated by a Gaussian of waist
/// `illumination_waist`: the first order has to carry HG_{n0}/Gaussian, i.e.
/// A ∝ |H_n(√2x/w)| and Φ = π where H_n < 0. The polynomial is normalized by
/// its maximum within |x| <= aperture_radius·w and clipped to 1 outside.
TargetField detection_target(int mode_order, double illumination_waist, const GridGeometry& grid,
                             double aperture_radius = 2.5);

/// 8-bit level for a phase value: floor(φ/2π·256) clamped to [0, 255].
std::uint8_t phase_level(double phase);

/// Binary PGM (P5) of the mask, one byte per pixel via phase_level(),
/// written top row (largest y) first.
void write_pgm(const HologramMask& mask, std::ostream& out);

} // namespace hgtomo
