#pragma once

#include "hgtomo/probability_matrix.hpp"

#include <cstdint>

namespace hgtomo {

enum class NoiseKind { none, poisson, gaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  /// poisson: expected counts for a probability of 1.
  double total_counts = 1e6;
  /// gaussian: additive standard deviation.
  double sigma = 0.0;

  static NoiseModel poisson(double total_counts) { return {NoiseKind::poisson, total_counts, 0.0}; }
  static NoiseModel gaussian(double sigma) { return {NoiseKind::gaussian, 1e6, sigma}; }

  void validate() const;
};

/// Counting or additive noise on raw data. poisson: Poisson(p·counts)/counts;
/// gaussian: p + N(0, σ²) clipped at 0. Reproducible for a given seed.
/// Normalization tag and mode_power are carried over unchanged.
ProbabilityMatrix add_noise(const ProbabilityMatrix& p, const NoiseModel& model, std::uint64_t seed);

} // namespace hgtomo
