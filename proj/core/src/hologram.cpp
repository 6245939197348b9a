#include "hgtomo/hologram.hpp"

#include "hgtomo/errors.hpp"
#include "hgtomo/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace hgtomo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void GratingSpec::validate(const GridGeometry& grid) const {
  if (!(period >= 4.0 * grid.dx * (1.0 - 1e-12)) || !std::isfinite(period)) {
    throw ValidationError("grating period must cover at least 4 pixels");
  }
}

void TargetField::validate() const {
  grid.validate();
  if (amplitude.size() != grid.size() || phase.size() != grid.size()) {
    throw ValidationError("target field arrays do not match the grid");
  }
  double max_a = 0.0;
  for (double a : amplitude) {
    if (!(a >= 0.0) || a > 1.0 + 1e-12) {
      throw ValidationError("target amplitude outside [0, 1]; normalize with A / max A");
    }
    max_a = std::max(max_a, a);
  }
  if (std::abs(max_a - 1.0) > 1e-12) {
    throw ValidationError("target amplitude is not normalized (max A = " + std::to_string(max_a) +
                          "); normalize with A / max A");
  }
}

TargetField TargetField::from_field(const FieldGrid& field) {
  TargetField t{field.geometry(), {}, {}};
  const auto values = field.values();
  double max_abs = 0.0;
  for (const auto& v : values) max_abs = std::max(max_abs, std::abs(v));
  if (!(max_abs > 0.0)) throw ValidationError("target field is identically zero");
  t.amplitude.reserve(values.size());
  t.phase.reserve(values.size());
  for (const auto& v : values) {
    t.amplitude.push_back(std::abs(v) / max_abs);
    t.phase.push_back(wrap_phase(std::arg(v)));
  }
  return t;
}

HologramMask::HologramMask(const GridGeometry& grid, GratingSpec grating, std::vector<double> phase)
    : grid_(grid), grating_(grating), phase_(std::move(phase)) {
  grid_.validate();
  if (phase_.size() != grid_.size()) throw ValidationError("mask size does not match grid");
  for (double p : phase_) {
    if (!(p >= 0.0 && p < kTwoPi)) throw ValidationError("mask phase outside [0, 2π)");
  }
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double wrap_phase(double x) {
  double v = std::fmod(x, kTwoPi);
  if (v < 0.0) v += kTwoPi;
  if (v >= kTwoPi) v = 0.0;
  return v;
}

MaskTerms mask_terms(double amplitude, double phase, Modulation modulation) {
  if (modulation == Modulation::phase_only) return {1.0, phase};
  return {sinc(std::numbers::pi * (amplitude - 1.0)), phase - std::numbers::pi * amplitude};
}

HologramMask synthesize_mask(const TargetField& target, const GratingSpec& grating) {
  target.validate();
  grating.validate(target.grid);
  const auto& g = target.grid;
  std::vector<double> phi(g.size());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(g.nx) + static_cast<std::size_t>(i);
      const auto [depth, offset] = mask_terms(target.amplitude[idx], target.phase[idx], grating.modulation);
      // depth <= 1 keeps the product inside [0, 2π); the clamp guards rounding at depth == 1.
      double value = depth * wrap_phase(offset + kTwoPi * g.x(i) / grating.period);
      if (value >= kTwoPi) value = std::nextafter(kTwoPi, 0.0);
      phi[idx] = value;
    }
  }
  return HologramMask(g, grating, std::move(phi));
}

FieldGrid apply_mask(const FieldGrid& input, const HologramMask& mask) {
  if (!input.geometry().matches(mask.grid())) {
    throw ValidationError("mask and field are on different grids");
  }
  FieldGrid out(input.geometry());
  const auto in = input.values();
  const auto phase = mask.phase();
  auto dst = out.values();
  for (std::size_t idx = 0; idx < in.size(); ++idx) dst[idx] = in[idx] * std::polar(1.0, phase[idx]);
  return out;
}

TargetField detection_target(int mode_order, double illumination_waist, const GridGeometry& grid,
                             double aperture_radius) {
  grid.validate();
  if (mode_order < 0 || mode_order > kMaxHermiteOrder) throw BoundsError("detector mode order out of range");
  if (!(illumination_waist > 0.0)) throw ValidationError("illumination waist must be positive");
  if (!(aperture_radius > 0.0)) throw ValidationError("aperture radius must be positive");

  std::vector<double> h(static_cast<std::size_t>(grid.nx));
  double peak = 0.0;
  const double limit = aperture_radius * illumination_waist;
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    h[static_cast<std::size_t>(i)] = hermite(mode_order, std::numbers::sqrt2 * x / illumination_waist);
    if (std::abs(x) <= limit) peak = std::max(peak, std::abs(h[static_cast<std::size_t>(i)]));
  }
  if (!(peak > 0.0)) throw ValidationError("aperture contains no grid pixels");

  TargetField t{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.nx) + static_cast<std::size_t>(i);
      const double v = h[static_cast<std::size_t>(i)];
      t.amplitude[idx] = std::min(std::abs(v) / peak, 1.0);
      t.phase[idx] = v < 0.0 ? std::numbers::pi : 0.0;
    }
  }
  return t;
}

std::uint8_t phase_level(double phase) {
  const double scaled = std::floor(phase / kTwoPi * 256.0);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

void write_pgm(const HologramMask& mask, std::ostream& out) {
  const auto& g = mask.grid();
  out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(g.nx));
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) row[static_cast<std::size_t>(i)] = static_cast<char>(phase_level(mask(i, j)));
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("failed to write PGM mask");
}

} // namespace hgtomo
