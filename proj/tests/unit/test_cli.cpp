#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hgtomo/errors.hpp"
#include "hgtomo/io.hpp"
#include "hgtomo/noise.hpp"
#include "hgtomo/pipeline.hpp"
#include "hgtomo/run_config.hpp"

#include <cmath>
#include <filesystem>
#include <locale>
#include <random>
#include <sstream>

using namespace hgtomo;
namespace fs = std::filesystem;

namespace {
ProbabilityMatrix sample_matrix() {
  Eigen::MatrixXd v(4, 3);
  v << 0.1, 0.2, 0.3, 1.0 / 3.0, 0.0, 0.25, 0.9, 1e-17, 0.5, 0.6, 0.7, 2.0 / 7.0;
  return make_probability_matrix(v, {-1.5, -0.1, 0.3, 2.0});
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hgtomo_test_" + name);
  fs::remove_all(dir);
  return dir;
}

struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
};
} // namespace

TEST_CASE("add_noise: reference values") {
  const auto p = sample_matrix();
  const auto same = add_noise(p, NoiseModel::gaussian(0.0), 5);
  CHECK(same.values == p.values);

  Eigen::MatrixXd big = Eigen::MatrixXd::Constant(30, 4, 0.35);
  const auto q = make_probability_matrix(big, std::vector<double>(30, 0.0));
  const auto noisy = add_noise(q, NoiseModel::poisson(1e8), 9);
  CHECK(((noisy.values - big).array() / big.array()).abs().maxCoeff() < 1e-3);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(add_noise(p, NoiseModel::gaussian(0.5), seed).values.minCoeff() >= 0.0);
    CHECK(add_noise(p, NoiseModel::poisson(10.0), seed).values.minCoeff() >= 0.0);
  }
}

TEST_CASE("add_noise: reproducible, zero stays zero, validated") {
  const auto p = sample_matrix();
  CHECK(add_noise(p, NoiseModel::poisson(1e4), 3).values == add_noise(p, NoiseModel::poisson(1e4), 3).values);
  CHECK(add_noise(p, NoiseModel::poisson(1e4), 3).values != add_noise(p, NoiseModel::poisson(1e4), 4).values);
  CHECK(add_noise(p, NoiseModel::poisson(1e4), 3).values(1, 1) == 0.0);
  CHECK(add_noise(p, NoiseModel{}, 3).values == p.values);
  CHECK_THROWS_AS(add_noise(p, NoiseModel::poisson(0.0), 1), ValidationError);
  CHECK_THROWS_AS(add_noise(p, NoiseModel::gaussian(-1.0), 1), ValidationError);

  // Poisson counts are integers.
  const Eigen::MatrixXd counts = add_noise(p, NoiseModel::poisson(1000.0), 2).values * 1000.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) CHECK(counts.data()[i] == doctest::Approx(std::round(counts.data()[i])));
}

TEST_CASE("CSV: write then read is exact") {
  auto p = sample_matrix();
  p.modes = {0, 2, 5};
  p.mode_power = {0.9, 0.123456789012345678, 1e-3};
  std::stringstream s;
  write_probability_csv(p, s);
  const auto back = read_probability_csv(s);
  CHECK(back.values == p.values);
  CHECK(back.displacements == p.displacements);
  CHECK(back.modes == p.modes);
  CHECK(back.mode_power == p.mode_power);
  CHECK(back.normalization == Normalization::raw);
}

TEST_CASE("CSV: header and layout") {
  std::stringstream s;
  write_probability_csv(sample_matrix(), s);
  std::string header;
  std::getline(s, header);
  CHECK(header == "delta,n0,n1,n2");
  std::string row;
  std::getline(s, row);
  CHECK(row == "-1.5,0.1,0.2,0.3");
}

TEST_CASE("CSV: parse errors name row and column") {
  auto fails_at = [](const std::string& text, std::size_t row, std::size_t column) {
    std::istringstream in(text);
    try {
      read_probability_csv(in);
    } catch (const ParseError& e) {
      CHECK(e.row() == row);
      CHECK(e.column() == column);
      return;
    }
    FAIL("no ParseError for: " << text);
  };
  fails_at("x,n0\n0,1\n", 1, 1);
  fails_at("delta,m0\n0,1\n", 1, 2);
  fails_at("delta,n0,n1\n0,1,2\n1,0.5,abc\n", 3, 3);
  fails_at("delta,n0\n0,1,2\n", 2, 3);
  fails_at("delta,n0\n0,-0.1\n", 2, 2);
  fails_at("delta,n0\n1,0.2\n0,0.3\n", 3, 1);
  fails_at("delta,n0\n", 2, 0);
  fails_at("", 1, 0);
  fails_at("delta,n0\n0,0.1\npower,0\n", 3, 2);
}

TEST_CASE("CSV: tolerant of spaces and CRLF") {
  std::istringstream in("delta, n0 , n1\r\n -1 , 0.5 ,0.25\r\n\r\n1,0.125, 0\r\n");
  const auto p = read_probability_csv(in);
  CHECK(p.values(1, 0) == 0.125);
  CHECK(p.displacements == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("CSV: locale independence") {
  const auto previous = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  std::stringstream s;
  s.imbue(std::locale());
  write_probability_csv(sample_matrix(), s);
  const std::string text = s.str();
  std::locale::global(previous);
  CHECK(text.find("0.25") != std::string::npos);
  CHECK(text.find("0,25") == std::string::npos);
  CHECK(format_double(0.1) == "0.1");
  double v = 0;
  CHECK(parse_double("2.5e-3", v));
  CHECK(v == 0.0025);
  CHECK_FALSE(parse_double("2,5", v));
  CHECK_FALSE(parse_double("nan", v));
}

TEST_CASE("POVM CSV") {
  PovmSet p = ideal_povm(2, 3);
  std::ostringstream out;
  write_povm_csv(p, {0, 1}, out);
  CHECK(out.str() == "n,k0,k1,k2\n0,1,0,0\n1,0,1,0\n");
  CHECK_THROWS_AS(write_povm_csv(p, {0}, out), ValidationError);
}

TEST_CASE("RunConfig: defaults") {
  const RunConfig c = parse_run_config("");
  CHECK(c.geometry.wavelength == 650e-9);
  CHECK(c.geometry.focal_length == 8e-3);
  CHECK(c.geometry.fiber_waist == 1.871e-6);
  REQUIRE(c.displacements.size() == 41);
  CHECK(c.displacements.front() == -3.0);
  CHECK(c.displacements.back() == 3.0);
  CHECK(c.displacements[20] == 0.0);
  CHECK(c.detectors == 5);
  CHECK(c.effective_basis_size() == 9);
  CHECK(c.normalization == Normalization::per_mode);
  CHECK(c.source == SourceKind::simulate);
  CHECK(c.noise.kind == NoiseKind::none);
}

TEST_CASE("RunConfig: YAML fields") {
  const RunConfig c = parse_run_config(R"(
geometry: {wavelength: 800e-9}
scan:
  displacements: {min: -2, max: 2, count: 9}
  detectors: 3
  modulation: phase
source: file:data/p.csv
noise: {kind: poisson, total_counts: 5000}
seed: 42
normalization: per-probe
reconstruction: {model: full, step_rule: fixed, max_iterations: 10}
output: {dir: out/x, export_masks: true}
)");
  CHECK(c.geometry.wavelength == 800e-9);
  CHECK(c.displacements.size() == 9);
  CHECK(c.detectors == 3);
  CHECK(c.effective_basis_size() == 7);
  CHECK(c.modulation == Modulation::phase_only);
  CHECK(c.source == SourceKind::file);
  CHECK(c.source_path == fs::path("data/p.csv"));
  CHECK(c.noise.kind == NoiseKind::poisson);
  CHECK(c.noise.total_counts == 5000);
  CHECK(c.seed == 42);
  CHECK(c.normalization == Normalization::per_probe);
  CHECK(c.model == PovmModel::full);
  CHECK(c.step_rule == StepRule::fixed);
  CHECK(c.max_iterations == 10);
  CHECK(c.output_dir == fs::path("out/x"));
  CHECK(c.export_masks);
}

TEST_CASE("RunConfig: errors") {
  CHECK_THROWS_AS(parse_run_config("scan: {detecters: 3}"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("bogus: 1"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("seed: [1"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("scan: {detectors: many}"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("source: somewhere"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("scan: {modulation: amplitude}"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("scan: {detectors: 6, basis_size: 5}").validate(), ValidationError);
  CHECK_THROWS_AS(parse_run_config("scan: {displacements: [0, 1, 1]}").validate(), ValidationError);
  CHECK_THROWS_AS(parse_run_config("noise: {kind: gaussian, sigma: -1}").validate(), ValidationError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.yaml"), IoError);
}

TEST_CASE("RunConfig: echo round-trips") {
  RunConfig c = parse_run_config("scan: {displacements: [-0.1, 0.30000000000000004, 2.5]}\nseed: 18446744073709551615\n"
                                 "simulation: {input_waist: 1.23e-4}\nsource: ideal\nnoise: {kind: gaussian, sigma: 0.01}");
  const std::string echo = config_echo(c);
  const RunConfig back = parse_run_config(echo);
  CHECK(config_echo(back) == echo);
  CHECK(back.displacements == c.displacements);
  CHECK(back.seed == 18446744073709551615ull);
  CHECK(*back.simulation.input_waist == 1.23e-4);
  CHECK(config_echo(parse_run_config(config_echo(RunConfig{}))) == config_echo(RunConfig{}));
}

TEST_CASE("CLI spellings") {
  CHECK(parse_modulation("phase") == Modulation::phase_only);
  CHECK(parse_modulation("exact") == Modulation::exact_amplitude);
  CHECK(parse_normalization("per-mode") == Normalization::per_mode);
  CHECK(parse_normalization("raw") == Normalization::raw);
  RunConfig c;
  parse_source("ideal", c);
  CHECK(c.source == SourceKind::analytic_ideal);
  parse_source("file:x.csv", c);
  CHECK(source_label(c) == "file:x.csv");
  CHECK_THROWS_AS(parse_source("file:", c), ValidationError);
}

TEST_CASE("run: analytic ideal source") {
  RunConfig c;
  c.source = SourceKind::analytic_ideal;
  const auto r = run(c);
  CHECK(r.similarity_to_ideal > 0.99);
  CHECK(r.reconstruction.converged);
  CHECK(r.r2_theory == doctest::Approx(1.0));
  CHECK(std::isfinite(r.r2_reconstructed));
  CHECK(r.efficiencies.empty());
  CHECK(r.seed == 0);
}

TEST_CASE("run: deterministic artifacts") {
  RunConfig c;
  c.source = SourceKind::analytic_ideal;
  c.noise = NoiseModel::poisson(1e5);
  c.seed = 1234;
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  c.output_dir = a;
  write_artifacts(run(c), c);
  c.output_dir = b;
  write_artifacts(run(c), c);
  for (const char* name : {"probabilities.csv", "normalized.csv", "predicted.csv", "theory.csv", "povm.csv"}) {
    CHECK(read_text_file(a / name) == read_text_file(b / name));
  }
  // The report echoes the output directory, which differs here by design.
  const auto strip = [](std::string s) {
    const auto pos = s.find("\"dir\"");
    return s.substr(0, pos);
  };
  CHECK(strip(read_text_file(a / "report.json")) == strip(read_text_file(b / "report.json")));
  CHECK(read_text_file(a / "report.json").find("\"seed\": 1234") != std::string::npos);
}

TEST_CASE("run: file source") {
  const auto dir = scratch("file_src");
  RunConfig c;
  c.source = SourceKind::analytic_ideal;
  c.output_dir = dir;
  const auto first = run(c);
  write_artifacts(first, c);

  RunConfig f;
  parse_source("file:" + (dir / "probabilities.csv").string(), f);
  const auto second = run(f);
  CHECK(second.reconstruction.povm.theta.isApprox(first.reconstruction.povm.theta, 1e-12));

  parse_source("file:" + (dir / "missing.csv").string(), f);
  CHECK_THROWS_AS(run(f), IoError);
}

TEST_CASE("run: report metrics are finite and schema is versioned") {
  RunConfig c;
  c.source = SourceKind::analytic_ideal;
  c.normalization = Normalization::per_probe;
  const auto r = run(c);
  const std::string json = report_json(r);
  CHECK(json.find("\"schema_version\": 1") != std::string::npos);
  CHECK(json.find(std::string("\"tool_version\": \"") + version() + "\"") != std::string::npos);
  CHECK(json.find("NaN") == std::string::npos);
  CHECK(std::isfinite(r.r2_reconstructed));
  CHECK(std::isfinite(r.similarity_to_ideal));
}
