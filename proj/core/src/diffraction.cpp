#include "hgtomo/diffraction.hpp"

#include "fft.hpp"
#include "hgtomo/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

namespace hgtomo {

namespace {

// Separable projection of a focal-plane field onto fiber-like modes
// f(x)·g(y): the y factor is reduced once, each x profile is then O(nx).
class SeparableProjector {
public:
  SeparableProjector(const FarField& ff, double fiber_waist) : ff_(ff), waist_(fiber_waist) {
    const auto& g = ff.field.geometry();
    g.require_extent(8.0 * fiber_waist, "fiber mode (8 waists)");
    reduced_.assign(static_cast<std::size_t>(g.nx), Complex{});
    for (int j = 0; j < g.ny; ++j) {
      const double gy = hg_factor(0, g.y(j), fiber_waist);
      if (gy == 0.0) continue;
      for (int i = 0; i < g.nx; ++i) reduced_[static_cast<std::size_t>(i)] += gy * ff.field(i, j);
    }
  }

  double displaced_gaussian(double displacement) const {
    const auto& g = ff_.field.geometry();
    const double shift = displacement * waist_;
    if (std::abs(shift) + 4.0 * waist_ > 0.5 * g.extent_x()) {
      throw ValidationError("fiber displacement " + std::to_string(displacement) +
                            " waists falls outside the focal-plane grid");
    }
    return finish([&](double x) { return hg_factor(0, x - shift, waist_); });
  }

  double hg_mode(int order) const {
    return finish([&](double x) { return hg_factor(order, x, waist_); });
  }

private:
  template <class Profile>
  double finish(Profile profile) const {
    const auto& g = ff_.field.geometry();
    Complex amp{};
    for (int i = 0; i < g.nx; ++i) amp += profile(g.x(i)) * reduced_[static_cast<std::size_t>(i)];
    amp *= g.dx * g.dy;
    return std::norm(amp) / ff_.source_power;
  }

  const FarField& ff_;
  double waist_;
  std::vector<Complex> reduced_;
};

void require_power(const FarField& ff) {
  if (!(ff.source_power > 0.0)) throw ValidationError("far field has no source power");
}

} // namespace

FarField far_field(const FieldGrid& input, const ExperimentGeometry& geometry) {
  geometry.validate();
  const auto& g = input.geometry();
  g.validate();

  FarField out;
  out.geometry = geometry;
  out.dkx = 2.0 * std::numbers::pi / g.extent_x();
  out.dky = 2.0 * std::numbers::pi / g.extent_y();
  const GridGeometry focal{g.nx, g.ny, geometry.focal_position(out.dkx), geometry.focal_position(out.dky)};

  std::vector<Complex> values(input.values().begin(), input.values().end());
  detail::centered_fft2(values, g.nx, g.ny);
  const double scale = std::sqrt(g.dx * g.dy / (focal.dx * focal.dy)) /
                       std::sqrt(static_cast<double>(g.nx) * static_cast<double>(g.ny));
  for (auto& v : values) v *= scale;

  out.field = FieldGrid(focal, std::move(values));
  out.source_power = input.power();
  return out;
}

FarField extract_first_order(const FarField& ff, const GratingSpec& grating, const GridGeometry& hologram_grid) {
  grating.validate(hologram_grid);
  const auto& g = ff.field.geometry();
  if (g.nx != hologram_grid.nx || g.ny != hologram_grid.ny) {
    throw ValidationError("far field and hologram grids differ in size");
  }
  const double carrier_k = 2.0 * std::numbers::pi / grating.period;
  const double half_k = std::numbers::pi / grating.period;
  const int carrier = static_cast<int>(std::lround(carrier_k / ff.dkx));
  const int half_x = static_cast<int>(std::floor(half_k / ff.dkx + 1e-9));
  const int half_y = static_cast<int>(std::floor(half_k / ff.dky + 1e-9));
  const int cx = g.nx / 2;
  const int cy = g.ny / 2;
  if (half_x < 1 || half_y < 1 || cx + carrier + half_x > g.nx || cy - half_y < 0 || cy + half_y > g.ny) {
    throw ValidationError("first-order window exceeds the far-field grid");
  }

  FarField out = ff;
  out.field = FieldGrid(g);
  for (int j = cy - half_y; j < cy + half_y; ++j) {
    for (int i = cx + carrier - half_x; i < cx + carrier + half_x; ++i) {
      out.field(i - carrier, j) = ff.field(i, j);
    }
  }
  return out;
}

double detection_probability(const FarField& ff, double displacement, const ExperimentGeometry& geometry) {
  geometry.validate();
  require_power(ff);
  return SeparableProjector(ff, geometry.fiber_waist).displaced_gaussian(displacement);
}

double mode_probability(const FarField& ff, int mode_order, const ExperimentGeometry& geometry) {
  geometry.validate();
  require_power(ff);
  if (mode_order < 0 || mode_order > kMaxHermiteOrder) throw BoundsError("mode order out of range");
  return SeparableProjector(ff, geometry.fiber_waist).hg_mode(mode_order);
}

void SimulationConfig::validate() const {
  if (grid_size < 16) throw ValidationError("simulation grid must have at least 16 pixels per axis");
  if (!(waist_pixels > 0.0)) throw ValidationError("waist_pixels must be positive");
  if (!(grating_period_pixels >= 4.0)) throw ValidationError("grating period must cover at least 4 pixels");
  if (!(aperture_radius > 0.0)) throw ValidationError("aperture radius must be positive");
  if (input_waist && !(*input_waist > 0.0)) throw ValidationError("input waist must be positive");
}

double SimulationConfig::illumination_waist(const ExperimentGeometry& geometry) const {
  return input_waist.value_or(geometry.matched_input_waist());
}

GridGeometry SimulationConfig::grid(const ExperimentGeometry& geometry) const {
  return GridGeometry::square(grid_size, illumination_waist(geometry) / waist_pixels);
}

void ScanConfig::validate() const {
  if (displacements.size() < 2) throw ValidationError("scan needs at least 2 displacements");
  for (std::size_t i = 0; i < displacements.size(); ++i) {
    if (!std::isfinite(displacements[i])) throw ValidationError("displacements must be finite");
    if (i > 0 && !(displacements[i] > displacements[i - 1])) {
      throw ValidationError("displacements must be strictly increasing");
    }
  }
  if (detector_modes.empty()) throw ValidationError("scan needs at least one detector mode");
  for (int n : detector_modes) {
    if (n < 0 || n > kMaxHermiteOrder) throw ValidationError("detector mode order out of range");
  }
  simulation.validate();
}

DetectorResponse simulate_detector(int mode_order, Modulation modulation, const ExperimentGeometry& geometry,
                                   const SimulationConfig& simulation) {
  geometry.validate();
  simulation.validate();
  const double waist = simulation.illumination_waist(geometry);
  const GridGeometry grid = simulation.grid(geometry);

  const FieldGrid input = hg_field({0, 0, waist}, grid);
  const GratingSpec grating = GratingSpec::pixels(simulation.grating_period_pixels, grid.dx, modulation);
  HologramMask mask = synthesize_mask(detection_target(mode_order, waist, grid, simulation.aperture_radius), grating);
  const FarField ff = far_field(apply_mask(input, mask), geometry);
  FarField first = extract_first_order(ff, grating, grid);
  const double fraction = first.power() / ff.power();
  return {std::move(mask), std::move(first), fraction};
}

ProbabilityMatrix simulate_scan(const ScanConfig& config, const ExperimentGeometry& geometry) {
  config.validate();
  geometry.validate();
  const auto n_modes = config.detector_modes.size();
  const auto n_probes = config.displacements.size();

  ProbabilityMatrix result;
  result.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_probes), static_cast<Eigen::Index>(n_modes));
  result.displacements = config.displacements;
  result.modes = config.detector_modes;
  result.mode_power.assign(n_modes, 0.0);

  // Each worker owns whole columns; columns are disjoint so no locking on results.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t c = next++; c < n_modes; c = next++) {
      try {
        const auto response = simulate_detector(config.detector_modes[c], config.modulation, geometry, config.simulation);
        const SeparableProjector fiber(response.first_order, geometry.fiber_waist);
        for (std::size_t r = 0; r < n_probes; ++r) {
          result.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              fiber.displaced_gaussian(config.displacements[r]);
        }
        result.mode_power[c] = response.first_order_fraction;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers = std::min(hw, n_modes);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

double diffraction_efficiency(int mode_order, Modulation modulation, const ExperimentGeometry& geometry,
                              const SimulationConfig& simulation) {
  if (mode_order < 0) throw ValidationError("mode order must be nonnegative");
  if (mode_order == 0) return 1.0;
  const double reference = simulate_detector(0, modulation, geometry, simulation).first_order_fraction;
  return simulate_detector(mode_order, modulation, geometry, simulation).first_order_fraction / reference;
}

} // namespace hgtomo
