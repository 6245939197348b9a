#pragma once

#include "hgtomo/field_grid.hpp"

namespace hgtomo {

/// Highest Hermite order accepted by hermite().
inline constexpr int kMaxHermiteOrder = 64;

/// Hermite-Gaussian mode HG_mn at its waist.
struct HGModeSpec {
  int m = 0;
  int n = 0;
  double waist = 1.0;

  void validate() const;
};

enum class ProbeKind { displaced, tilted };

/// Fundamental Gaussian calibration probe. `parameter` is the transverse
/// displacement along x (length) for displaced probes, or the transverse
/// wave-vector component k_x (1/length) for tilted probes.
struct ProbeSpec {
  ProbeKind kind = ProbeKind::displaced;
  double parameter = 0.0;
  double waist = 1.0;

  static ProbeSpec displaced(double d, double waist) { return {ProbeKind::displaced, d, waist}; }
  static ProbeSpec tilted(double k, double waist) { return {ProbeKind::tilted, k, waist}; }

  void validate() const;
};

/// Far-field detection geometry: lens of focal length f, light of wavelength
/// λ, single-mode fiber of waist w_f in the focal plane. Defaults are the
/// values of the reference 650 nm setup.
struct ExperimentGeometry {
  double wavelength = 650e-9;
  double focal_length = 8e-3;
  double fiber_waist = 1.871e-6;

  void validate() const;

  /// Hologram-plane Gaussian waist whose far field is the fiber mode, λf/(π w_f).
  double matched_input_waist() const;
  /// Focal-plane position of transverse wave number k: λ f k / 2π.
  double focal_position(double k) const;
  /// Tilt k = 2πθ/λ for a tilt angle θ (small-angle).
  double wavenumber_for_angle(double theta) const;
};

/// Physicists' Hermite polynomial H_order(x), by the three-term recurrence.
/// Throws BoundsError for orders outside [0, kMaxHermiteOrder].
double hermite(int order, double x);

/// ln(n!): exact product for n <= 20, lgamma beyond.
double log_factorial(int n);

/// One-dimensional normalized HG factor
/// (√(2/π)/(w 2^n n!))^{1/2} H_n(√2 x/w) exp(-x²/w²).
double hg_factor(int n, double x, double waist);

/// HG_mn sampled on `grid`; requires extent >= 8·waist.
FieldGrid hg_field(const HGModeSpec& spec, const GridGeometry& grid);

/// Displaced or tilted fundamental Gaussian probe sampled on `grid`.
/// Requires extent >= 8·waist and, for displaced probes, >= 2(|d| + 4·waist).
/// Tilts must stay below the grid Nyquist wave number π/dx.
FieldGrid probe_field(const ProbeSpec& spec, const GridGeometry& grid);

/// Discrete inner product Σ conj(a)·b·dx·dy.
Complex overlap(const FieldGrid& a, const FieldGrid& b);

/// Ideal projective-detector response to a displaced Gaussian:
/// (d/w)^{2n}/n! · exp(-d²/w²).
double ideal_probability(int n, double d, double waist);

} // namespace hgtomo
