#include "hgtomo/io.hpp"

#include "hgtomo/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace hgtomo {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

int parse_mode_label(std::string_view label, std::size_t column) {
  if (label.size() < 2 || label.front() != 'n') throw ParseError("expected header label n<order>", 1, column);
  int order = -1;
  const auto* end = label.data() + label.size();
  const auto [ptr, ec] = std::from_chars(label.data() + 1, end, order);
  if (ec != std::errc() || ptr != end || order < 0) throw ParseError("bad mode label '" + std::string(label) + "'", 1, column);
  return order;
}

} // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buffer, ptr);
}

bool parse_double(std::string_view text, double& value) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

void write_probability_csv(const ProbabilityMatrix& p, std::ostream& out) {
  p.validate();
  out << "delta";
  for (int n : p.modes) out << ",n" << n;
  out << '\n';
  for (Eigen::Index r = 0; r < p.probes(); ++r) {
    out << format_double(p.displacements[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < p.detectors(); ++c) out << ',' << format_double(p.values(r, c));
    out << '\n';
  }
  if (!p.mode_power.empty()) {
    out << "power";
    for (double w : p.mode_power) out << ',' << format_double(w);
    out << '\n';
  }
}

ProbabilityMatrix read_probability_csv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw ParseError("empty input", 1, 0);
  ++row;
  const auto header = split(line);
  if (header.empty() || header[0] != "delta") throw ParseError("first header field must be 'delta'", 1, 1);
  if (header.size() < 2) throw ParseError("no detector columns", 1, 2);

  ProbabilityMatrix p;
  for (std::size_t c = 1; c < header.size(); ++c) p.modes.push_back(parse_mode_label(header[c], c + 1));
  const std::size_t width = header.size();

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    if (!p.mode_power.empty()) throw ParseError("data after the power row", row, 1);
    const auto fields = split(line);
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()), row,
                       std::min(fields.size(), width) + 1);
    }
    std::vector<double> values(width);
    const bool power_row = fields[0] == "power";
    for (std::size_t c = power_row ? 1 : 0; c < width; ++c) {
      if (!parse_double(fields[c], values[c])) {
        throw ParseError("not a number: '" + std::string(fields[c]) + "'", row, c + 1);
      }
    }
    if (power_row) {
      p.mode_power.assign(values.begin() + 1, values.end());
      for (std::size_t c = 0; c < p.mode_power.size(); ++c) {
        if (!(p.mode_power[c] > 0.0)) throw ParseError("power must be positive", row, c + 2);
      }
      continue;
    }
    for (std::size_t c = 1; c < width; ++c) {
      if (values[c] < 0.0) throw ParseError("negative probability", row, c + 1);
    }
    if (!p.displacements.empty() && !(values[0] > p.displacements.back())) {
      throw ParseError("displacements must be strictly increasing", row, 1);
    }
    p.displacements.push_back(values[0]);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("no data rows", row + 1, 0);

  p.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 1; c < width; ++c) {
      p.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = rows[r][c];
    }
  }
  return p;
}

ProbabilityMatrix read_probability_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_probability_csv(in);
}

void write_povm_csv(const PovmSet& povm, const std::vector<int>& modes, std::ostream& out) {
  const Eigen::MatrixXd theta = povm.diagonal_part();
  if (static_cast<Eigen::Index>(modes.size()) != theta.rows()) {
    throw ValidationError("mode label count does not match POVM outcomes");
  }
  out << 'n';
  for (Eigen::Index k = 0; k < theta.cols(); ++k) out << ",k" << k;
  out << '\n';
  for (Eigen::Index n = 0; n < theta.rows(); ++n) {
    out << modes[static_cast<std::size_t>(n)];
    for (Eigen::Index k = 0; k < theta.cols(); ++k) out << ',' << format_double(theta(n, k));
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

} // namespace hgtomo
