#include "hgtomo/noise.hpp"

#include "hgtomo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hgtomo {

void NoiseModel::validate() const {
  switch (kind) {
  case NoiseKind::none:
    return;
  case NoiseKind::poisson:
    if (!(total_counts > 0.0) || !std::isfinite(total_counts)) {
      throw ValidationError("poisson noise needs total_counts > 0");
    }
    return;
  case NoiseKind::gaussian:
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("gaussian noise needs sigma >= 0");
    return;
  }
}

ProbabilityMatrix add_noise(const ProbabilityMatrix& p, const NoiseModel& model, std::uint64_t seed) {
  model.validate();
  ProbabilityMatrix out = p;
  if (model.kind == NoiseKind::none) return out;
  if (model.kind == NoiseKind::gaussian && model.sigma == 0.0) return out;

  // Column-major traversal fixes the draw order, and with it the output, per seed.
  std::mt19937_64 rng(seed);
  auto& v = out.values;
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      double& x = v(r, c);
      if (model.kind == NoiseKind::poisson) {
        const double mean = x * model.total_counts;
        if (mean <= 0.0) {
          x = 0.0;
          continue;
        }
        // std::poisson_distribution<long long> is exact for the means used here.
        std::poisson_distribution<long long> draw(mean);
        x = static_cast<double>(draw(rng)) / model.total_counts;
      } else {
        std::normal_distribution<double> draw(0.0, model.sigma);
        x = std::max(0.0, x + draw(rng));
      }
    }
  }
  return out;
}

} // namespace hgtomo
