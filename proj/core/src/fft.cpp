#include "fft.hpp"

#include "hgtomo/errors.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <vector>

namespace hgtomo::detail {

namespace {

// FFTW planning is not thread-safe; execution on a private plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Cyclic shift by `shift` pixels along both axes, out of place.
void cyclic_shift(std::span<const Complex> src, std::span<Complex> dst, int nx, int ny, int sx, int sy) {
  for (int j = 0; j < ny; ++j) {
    const int jj = (j + sy) % ny;
    for (int i = 0; i < nx; ++i) {
      const int ii = (i + sx) % nx;
      dst[static_cast<std::size_t>(jj) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ii)] =
          src[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)];
    }
  }
}

} // namespace

void centered_fft2(std::span<Complex> values, int nx, int ny) {
  if (values.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
    throw ValidationError("FFT buffer size does not match grid");
  }
  auto* buffer = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * values.size()));
  if (buffer == nullptr) throw std::bad_alloc();
  std::unique_ptr<Complex, decltype(&fftw_free)> owner(buffer, &fftw_free);
  std::span<Complex> work(buffer, values.size());

  // ifftshift moves pixel nx/2 (the origin) to index 0.
  cyclic_shift(values, work, nx, ny, nx - nx / 2, ny - ny / 2);

  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    auto* raw = reinterpret_cast<fftw_complex*>(buffer);
    plan.reset(fftw_plan_dft_2d(ny, nx, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE));
  }
  if (!plan) throw std::runtime_error("FFTW planning failed");
  fftw_execute(plan.get());

  // fftshift puts zero frequency back at index nx/2.
  cyclic_shift(work, values, nx, ny, nx / 2, ny / 2);
}

} // namespace hgtomo::detail
