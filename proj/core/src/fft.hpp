#pragma once

#include "hgtomo/field_grid.hpp"

#include <span>

namespace hgtomo::detail {

/// In-place centred 2-D DFT (ifftshift → forward FFT → fftshift), unscaled.
/// `values` is row-major with nx fastest, as in FieldGrid.
void centered_fft2(std::span<Complex> values, int nx, int ny);

} // namespace hgtomo::detail
