#include "hgtomo/modes.hpp"

#include "hgtomo/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace hgtomo {

namespace {

constexpr std::array<double, 21> kFactorials = [] {
  std::array<double, 21> f{};
  f[0] = 1.0;
  for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<double>(i);
  return f;
}();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string(what) + " must be positive and finite");
  }
}

} // namespace

void HGModeSpec::validate() const {
  if (m < 0 || n < 0) throw ValidationError("HG mode orders must be nonnegative");
  if (m > kMaxHermiteOrder || n > kMaxHermiteOrder) {
    throw BoundsError("HG mode order above " + std::to_string(kMaxHermiteOrder));
  }
  require_positive(waist, "HG mode waist");
}

void ProbeSpec::validate() const {
  require_positive(waist, "probe waist");
  if (!std::isfinite(parameter)) throw ValidationError("probe parameter must be finite");
}

void ExperimentGeometry::validate() const {
  require_positive(wavelength, "wavelength");
  require_positive(focal_length, "focal length");
  require_positive(fiber_waist, "fiber waist");
}

double ExperimentGeometry::matched_input_waist() const {
  return wavelength * focal_length / (std::numbers::pi * fiber_waist);
}

double ExperimentGeometry::focal_position(double k) const {
  return wavelength * focal_length * k / (2.0 * std::numbers::pi);
}

double ExperimentGeometry::wavenumber_for_angle(double theta) const {
  return 2.0 * std::numbers::pi * theta / wavelength;
}

double hermite(int order, double x) {
  if (order < 0 || order > kMaxHermiteOrder) {
    throw BoundsError("Hermite order " + std::to_string(order) + " outside [0, " +
                      std::to_string(kMaxHermiteOrder) + "]");
  }
  if (order == 0) return 1.0;
  double prev = 1.0;
  double curr = 2.0 * x;
  for (int k = 1; k < order; ++k) {
    const double next = 2.0 * x * curr - 2.0 * k * prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

double log_factorial(int n) {
  if (n < 0) throw ValidationError("factorial of a negative number");
  if (n < static_cast<int>(kFactorials.size())) return std::log(kFactorials[static_cast<std::size_t>(n)]);
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double hg_factor(int n, double x, double waist) {
  const double log_norm = 0.5 * (0.5 * std::log(2.0 / std::numbers::pi) - std::log(waist) -
                                 n * std::numbers::ln2 - log_factorial(n));
  const double u = x / waist;
  return std::exp(log_norm - u * u) * hermite(n, std::numbers::sqrt2 * u);
}

FieldGrid hg_field(const HGModeSpec& spec, const GridGeometry& grid) {
  spec.validate();
  grid.validate();
  grid.require_extent(8.0 * spec.waist, "HG mode (8 waists)");

  // Separable: φ_mn(x, y) = f_m(x)·f_n(y).
  std::vector<double> fx(static_cast<std::size_t>(grid.nx));
  std::vector<double> fy(static_cast<std::size_t>(grid.ny));
  for (int i = 0; i < grid.nx; ++i) fx[static_cast<std::size_t>(i)] = hg_factor(spec.m, grid.x(i), spec.waist);
  for (int j = 0; j < grid.ny; ++j) fy[static_cast<std::size_t>(j)] = hg_factor(spec.n, grid.y(j), spec.waist);

  FieldGrid field(grid);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      field(i, j) = fx[static_cast<std::size_t>(i)] * fy[static_cast<std::size_t>(j)];
    }
  }
  return field;
}

FieldGrid probe_field(const ProbeSpec& spec, const GridGeometry& grid) {
  spec.validate();
  grid.validate();
  grid.require_extent(8.0 * spec.waist, "probe beam (8 waists)");

  double shift = 0.0;
  double k = 0.0;
  if (spec.kind == ProbeKind::displaced) {
    shift = spec.parameter;
    grid.require_extent(2.0 * (std::abs(shift) + 4.0 * spec.waist), "displaced probe");
  } else {
    k = spec.parameter;
    const double nyquist = std::numbers::pi / grid.dx;
    if (std::abs(k) >= nyquist) {
      throw ValidationError("probe tilt exceeds the grid Nyquist wave number");
    }
  }

  std::vector<Complex> fx(static_cast<std::size_t>(grid.nx));
  std::vector<double> fy(static_cast<std::size_t>(grid.ny));
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    fx[static_cast<std::size_t>(i)] =
        hg_factor(0, x - shift, spec.waist) * std::polar(1.0, k * x);
  }
  for (int j = 0; j < grid.ny; ++j) fy[static_cast<std::size_t>(j)] = hg_factor(0, grid.y(j), spec.waist);

  FieldGrid field(grid);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      field(i, j) = fx[static_cast<std::size_t>(i)] * fy[static_cast<std::size_t>(j)];
    }
  }
  return field;
}

Complex overlap(const FieldGrid& a, const FieldGrid& b) {
  if (!a.geometry().matches(b.geometry())) {
    throw ValidationError("overlap of fields on different grids");
  }
  const auto va = a.values();
  const auto vb = b.values();
  Complex sum{};
  for (std::size_t idx = 0; idx < va.size(); ++idx) sum += std::conj(va[idx]) * vb[idx];
  return sum * (a.dx() * a.dy());
}

double ideal_probability(int n, double d, double waist) {
  if (n < 0) throw ValidationError("mode order must be nonnegative");
  require_positive(waist, "waist");
  const double u = d / waist;
  const double u2 = u * u;
  if (n == 0) return std::exp(-u2);
  if (u2 == 0.0) return 0.0;
  if (n <= 20) {
    return std::pow(u2, n) / kFactorials[static_cast<std::size_t>(n)] * std::exp(-u2);
  }
  return std::exp(n * std::log(u2) - log_factorial(n) - u2);
}

} // namespace hgtomo
