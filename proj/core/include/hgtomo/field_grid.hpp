#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace hgtomo {

using Complex = std::complex<double>;

/// Sampling geometry of a uniform 2-D transverse grid.
///
/// Pixel (i, j) sits at ((i - nx/2)·dx, (j - ny/2)·dy), so for even sizes the
/// origin is the pixel just past the geometric centre. Every module (field
/// synthesis, FFT shifts, first-order extraction) uses this convention.
struct GridGeometry {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  /// Throws ValidationError unless nx, ny >= 2 and dx, dy > 0.
  void validate() const;

  double x(int i) const { return (i - nx / 2) * dx; }
  double y(int j) const { return (j - ny / 2) * dy; }
  double extent_x() const { return nx * dx; }
  double extent_y() const { return ny * dy; }
  double min_extent() const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  /// Same pixel counts and pitches (pitches compared to 1e-12 relative).
  bool matches(const GridGeometry& other) const;

  /// Throws ValidationError if the smaller extent is below `length`.
  void require_extent(double length, std::string_view what) const;

  static GridGeometry square(int n, double pitch) { return {n, n, pitch, pitch}; }
};

/// Complex scalar field sampled on a GridGeometry. Row-major with x fastest:
/// value (i, j) lives at index j·nx + i.
class FieldGrid {
public:
  FieldGrid() = default;
  explicit FieldGrid(const GridGeometry& geometry);
  FieldGrid(const GridGeometry& geometry, std::vector<Complex> values);

  const GridGeometry& geometry() const { return geometry_; }
  int nx() const { return geometry_.nx; }
  int ny() const { return geometry_.ny; }
  double dx() const { return geometry_.dx; }
  double dy() const { return geometry_.dy; }

  Complex& operator()(int i, int j) { return values_[index(i, j)]; }
  const Complex& operator()(int i, int j) const { return values_[index(i, j)]; }

  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

  /// Sum of |value|²·dx·dy.
  double power() const;

private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(geometry_.nx) +
           static_cast<std::size_t>(i);
  }

  GridGeometry geometry_{};
  std::vector<Complex> values_;
};

} // namespace hgtomo
