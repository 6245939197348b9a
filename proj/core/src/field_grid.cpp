#include "hgtomo/field_grid.hpp"

#include "hgtomo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hgtomo {

void GridGeometry::validate() const {
  if (nx < 2 || ny < 2) {
    throw ValidationError("grid needs at least 2 pixels per axis, got " + std::to_string(nx) +
                          "x" + std::to_string(ny));
  }
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw ValidationError("grid pixel pitch must be positive and finite");
  }
}

double GridGeometry::min_extent() const { return std::min(extent_x(), extent_y()); }

bool GridGeometry::matches(const GridGeometry& other) const {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  return nx == other.nx && ny == other.ny && close(dx, other.dx) && close(dy, other.dy);
}

void GridGeometry::require_extent(double length, std::string_view what) const {
  if (min_extent() < length) {
    throw ValidationError("grid extent " + std::to_string(min_extent()) + " is smaller than " +
                          std::to_string(length) + " required by " + std::string(what));
  }
}

FieldGrid::FieldGrid(const GridGeometry& geometry) : geometry_(geometry) {
  geometry_.validate();
  values_.assign(geometry_.size(), Complex{});
}

FieldGrid::FieldGrid(const GridGeometry& geometry, std::vector<Complex> values)
    : geometry_(geometry), values_(std::move(values)) {
  geometry_.validate();
  if (values_.size() != geometry_.size()) {
    throw ValidationError("field value count does not match grid size");
  }
}

double FieldGrid::power() const {
  double sum = 0.0;
  for (const auto& v : values_) sum += std::norm(v);
  return sum * geometry_.dx * geometry_.dy;
}

} // namespace hgtomo
