#include "hgtomo/probability_matrix.hpp"

#include "hgtomo/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace hgtomo {

void ProbabilityMatrix::validate() const {
  if (values.rows() == 0 || values.cols() == 0) throw ValidationError("probability matrix is empty");
  if (static_cast<Eigen::Index>(displacements.size()) != values.rows()) {
    throw ValidationError("displacement count does not match probability rows");
  }
  if (static_cast<Eigen::Index>(modes.size()) != values.cols()) {
    throw ValidationError("mode label count does not match probability columns");
  }
  if (!mode_power.empty() && static_cast<Eigen::Index>(mode_power.size()) != values.cols()) {
    throw ValidationError("mode power count does not match probability columns");
  }
  for (double p : mode_power) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("mode power must be positive");
  }
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
      const double v = values(r, c);
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("probability entry (" + std::to_string(r) + ", " + std::to_string(c) +
                              ") is negative or not finite");
      }
    }
  }
  if (normalization == Normalization::per_mode && mode_power.empty()) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (std::abs(values.col(c).sum() - 1.0) > 1e-9) {
        throw ValidationError("per_mode column " + std::to_string(c) + " does not sum to 1");
      }
    }
  }
  if (normalization == Normalization::per_probe) {
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
      if (values.row(r).sum() > 1.0 + 1e-9) {
        throw ValidationError("per_probe row " + std::to_string(r) + " sums above 1");
      }
    }
  }
}

ProbabilityMatrix make_probability_matrix(Eigen::MatrixXd values, std::vector<double> displacements) {
  ProbabilityMatrix p;
  p.modes.resize(static_cast<std::size_t>(values.cols()));
  std::iota(p.modes.begin(), p.modes.end(), 0);
  p.values = std::move(values);
  p.displacements = std::move(displacements);
  return p;
}

ProbabilityMatrix normalize(const ProbabilityMatrix& p, Normalization scheme) {
  p.validate();
  if (p.normalization == scheme) return p;
  if (p.normalization != Normalization::raw) {
    throw ValidationError("only raw probability data can be re-normalized");
  }
  ProbabilityMatrix out = p;
  out.normalization = scheme;
  switch (scheme) {
  case Normalization::raw:
    break;
  case Normalization::per_mode:
    for (Eigen::Index c = 0; c < out.values.cols(); ++c) {
      const double total = p.mode_power.empty() ? p.values.col(c).sum()
                                                : p.mode_power[static_cast<std::size_t>(c)];
      if (!(total > 0.0)) throw ValidationError("column " + std::to_string(c) + " has no intensity");
      out.values.col(c) /= total;
    }
    // Power is now expressed relative to each detector's own diffracted power.
    if (!out.mode_power.empty()) out.mode_power.assign(out.mode_power.size(), 1.0);
    break;
  case Normalization::per_probe:
    for (Eigen::Index r = 0; r < out.values.rows(); ++r) {
      const double total = p.values.row(r).sum();
      if (total > 0.0) out.values.row(r) /= total;
    }
    break;
  }
  return out;
}

} // namespace hgtomo
