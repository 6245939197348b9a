#pragma once

#include "hgtomo/probability_matrix.hpp"
#include "hgtomo/tomography.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace hgtomo {

/// Shortest decimal text that parses back to exactly `value`; always uses '.'.
std::string format_double(double value);

/// Strict, locale-independent parse of a whole field (surrounding blanks allowed).
/// Returns false on anything that is not a complete finite number.
bool parse_double(std::string_view text, double& value);

/// CSV layout:
///   delta,n0,n1,...        header, one column per detector mode order
///   -3,1.2e-4,...          one row per probe, δ in fiber waists
///   power,0.93,...         optional: per-detector diffracted power
void write_probability_csv(const ProbabilityMatrix& p, std::ostream& out);

/// Inverse of write_probability_csv. The result is tagged raw. Throws
/// ParseError naming the 1-based row and column of the first problem.
ProbabilityMatrix read_probability_csv(std::istream& in);
ProbabilityMatrix read_probability_csv(const std::filesystem::path& path);

/// Header `n,k0,k1,...`; one row per detector with θ⁽ⁿ⁾_k (diagonal part for
/// the full model).
void write_povm_csv(const PovmSet& povm, const std::vector<int>& modes, std::ostream& out);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace hgtomo
