#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hgtomo/errors.hpp"
#include "hgtomo/modes.hpp"
#include "hgtomo/probability_matrix.hpp"
#include "hgtomo/tomography.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace hgtomo;

namespace {
std::vector<double> grid41() {
  std::vector<double> d;
  for (int i = 0; i < 41; ++i) d.push_back(-3.0 + 0.15 * i);
  return d;
}

ProbabilityMatrix ideal_data(const std::vector<double>& d, int outcomes) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(d.size()), outcomes);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (int n = 0; n < outcomes; ++n) v(i, n) = ideal_probability(n, d[static_cast<std::size_t>(i)], 1.0);
  }
  return make_probability_matrix(v, d);
}

PovmSet from_oracle(const std::vector<std::vector<double>>& theta) {
  PovmSet p;
  p.theta.resize(static_cast<Eigen::Index>(theta.size()), static_cast<Eigen::Index>(theta[0].size()));
  for (std::size_t n = 0; n < theta.size(); ++n) {
    for (std::size_t k = 0; k < theta[0].size(); ++k) p.theta(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = theta[n][k];
  }
  return p;
}

ReconstructionConfig config(int m) {
  ReconstructionConfig cfg;
  cfg.basis_size = m;
  return cfg;
}
} // namespace

TEST_CASE("build_design_matrix: reference values") {
  const std::vector<double> d{0.0, 1.0};
  const auto f = build_design_matrix(d, 3);
  CHECK(f.values(0, 0) == 1.0);
  CHECK(f.values(0, 1) == 0.0);
  CHECK(f.values(0, 2) == 0.0);
  const double e = std::exp(-1.0);
  CHECK(f.values(1, 0) == doctest::Approx(e).epsilon(1e-15));
  CHECK(f.values(1, 1) == doctest::Approx(e).epsilon(1e-15));
  CHECK(f.values(1, 2) == doctest::Approx(e / 2).epsilon(1e-15));

  const std::vector<double> one{1.0};
  CHECK(build_design_matrix(one, 60).values.row(0).sum() == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(build_design_matrix(std::vector<double>{}, 3), ValidationError);
  CHECK_THROWS_AS(build_design_matrix(d, 0), ValidationError);
}

TEST_CASE("build_design_matrix: oracle agreement and row sums <= 1") {
  const auto d = grid41();
  const auto f = build_design_matrix(d, 12);
  for (std::size_t i = 0; i < d.size(); ++i) {
    double row = 0.0;
    for (int k = 0; k < 12; ++k) {
      const double v = f.values(static_cast<Eigen::Index>(i), k);
      CHECK(v == doctest::Approx(oracle::design_entry(d[i], k)).epsilon(1e-12).scale(1e-300));
      CHECK(v >= 0.0);
      row += v;
    }
    CHECK(row <= 1.0 + 1e-12);
  }
}

TEST_CASE("build_design_matrix: full model") {
  const std::vector<double> d{-1.5, 0.0, 0.7};
  const auto f = build_design_matrix(d, 4, PovmModel::full);
  REQUIRE(f.values.cols() == 16);
  const auto diag = build_design_matrix(d, 4);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 4; ++k) CHECK(f.values(i, k * 4 + k) == doctest::Approx(diag.values(i, k)));
  }
  // Odd k + p changes sign with δ.
  CHECK(f.values(0, 1) < 0.0);
  CHECK(f.values(0, 1) == doctest::Approx(-std::exp(-2.25) * 1.5));
}

TEST_CASE("project_to_simplex") {
  std::vector<double> v{0.3, -0.2, 1.4};
  project_to_simplex(v);
  CHECK(v[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(v[2] == doctest::Approx(1.0));
  std::vector<double> inside{0.2, 0.3, 0.5};
  project_to_simplex(inside);
  CHECK(inside[1] == doctest::Approx(0.3));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(1 + trial % 9);
    for (auto& e : x) e = z(rng);
    const auto original = x;
    project_to_simplex(x);
    double sum = 0.0;
    for (double e : x) {
      REQUIRE(e >= 0.0);
      sum += e;
    }
    REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
    // Optimality: x − original = −τ on the support, and ≥ −τ off it.
    double tau = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) if (x[i] > 0.0) tau = original[i] - x[i];
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > 0.0) CHECK(original[i] - x[i] == doctest::Approx(tau).epsilon(1e-9).scale(1.0));
      else CHECK(original[i] <= tau + 1e-12);
    }
  }
}

TEST_CASE("reconstruct: generate-then-invert (D=41, N=5, M=7)") {
  const auto d = grid41();
  const auto f = build_design_matrix(d, 7);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto truth = from_oracle(oracle::random_povm(5, 7, seed));
    const auto p = predict(truth, f);
    const auto r = reconstruct(p, f, config(7));
    CHECK(r.converged);
    CHECK((r.povm.theta - truth.theta).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("reconstruct: single detector is forced to the identity") {
  const auto d = grid41();
  const auto f = build_design_matrix(d, 6);
  auto p = ideal_data(d, 1);
  p.values *= 0.3;
  const auto r = reconstruct(p, f, config(6));
  for (int k = 0; k < 6; ++k) CHECK(r.povm.theta(0, k) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reconstruct: ideal data (N=5, M=7)") {
  const auto d = grid41();
  const auto f = build_design_matrix(d, 7);
  const auto r = reconstruct(ideal_data(d, 5), f, config(7));
  CHECK(r.converged);
  double worst = 0.0;
  for (int n = 0; n < 5; ++n) {
    for (int k = 0; k < 5; ++k) worst = std::max(worst, std::abs(r.povm.theta(n, k) - (n == k ? 1.0 : 0.0)));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("reconstruct: invariants on assorted inputs") {
  const auto d = grid41();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int outcomes = 2 + trial % 4;
    const int m = outcomes + 1 + trial % 3;
    Eigen::MatrixXd v(41, outcomes);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = u(rng);
    const auto f = build_design_matrix(d, m);
    const auto r = reconstruct(make_probability_matrix(v, d), f, config(m));
    CHECK(r.povm.theta.minCoeff() >= -1e-12);
    CHECK(r.povm.completeness_error() < 1e-8);
    REQUIRE(r.objective_history.size() == static_cast<std::size_t>(r.iterations) + 1);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) REQUIRE(r.objective_history[i] <= r.objective_history[i - 1]);
    CHECK(r.residual_norm == doctest::Approx((predict(r.povm, f).values - v).norm()).epsilon(1e-9));
  }
}

TEST_CASE("reconstruct: fixed step rule reaches the same minimizer") {
  const auto d = grid41();
  const auto f = build_design_matrix(d, 6);
  auto cfg = config(6);
  cfg.step_rule = StepRule::fixed;
  const auto truth = from_oracle(oracle::random_povm(3, 6, 77));
  const auto r = reconstruct(predict(truth, f), f, cfg);
  CHECK((r.povm.theta - truth.theta).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("reconstruct: non-convergence is reported in-band") {
  const auto d = grid41();
  const auto f = build_design_matrix(d, 9);
  auto cfg = config(9);
  cfg.max_iterations = 5;
  const auto r = reconstruct(ideal_data(d, 5), f, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 5);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("reconstruct: validation") {
  const auto d = grid41();
  const auto p = ideal_data(d, 5);
  CHECK_THROWS_AS(reconstruct(p, build_design_matrix(d, 4), config(4)), ValidationError);
  CHECK_THROWS_AS(reconstruct(p, build_design_matrix(d, 7), config(8)), ValidationError);
  const std::vector<double> shorter(d.begin(), d.end() - 1);
  CHECK_THROWS_AS(reconstruct(p, build_design_matrix(shorter, 7), config(7)), ValidationError);
  auto shifted = d;
  shifted[3] += 0.01;
  CHECK_THROWS_AS(reconstruct(p, build_design_matrix(shifted, 7), config(7)), ValidationError);
  auto cfg = config(7);
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(reconstruct(p, build_design_matrix(d, 7), cfg), ValidationError);
}

TEST_CASE("reconstruct: ill-conditioned design warns") {
  std::vector<double> narrow;
  for (int i = 0; i < 20; ++i) narrow.push_back(-0.2 + 0.02 * i);
  const auto f = build_design_matrix(narrow, 8);
  CHECK(f.condition_number() > 1e8);
  const auto r = reconstruct(ideal_data(narrow, 3), f, config(8));
  CHECK(r.povm.completeness_error() < 1e-8);
  bool warned = false;
  for (const auto& w : r.warnings) warned = warned || w.find("ill-conditioned") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("reconstruct: full model stays a POVM") {
  const auto d = grid41();
  const auto f = build_design_matrix(d, 5, PovmModel::full);
  auto cfg = config(5);
  cfg.model = PovmModel::full;
  cfg.max_iterations = 3000;
  const auto r = reconstruct(ideal_data(d, 3), f, cfg);
  CHECK(r.povm.outcomes() == 3);
  CHECK(r.povm.basis_size() == 5);
  CHECK(r.povm.positivity_violation() < 1e-6);
  CHECK(r.povm.completeness_error() < 1e-6);
  for (std::size_t i = 1; i < r.objective_history.size(); ++i) REQUIRE(r.objective_history[i] <= r.objective_history[i - 1]);
  for (const auto& e : r.povm.elements) CHECK((e - e.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("predict: reference values") {
  const std::vector<double> d{0.0, 1.0};
  const auto f = build_design_matrix(d, 4);
  const auto p = predict(ideal_povm(3, 4), f);
  CHECK(p.values(0, 0) == 1.0);
  CHECK(p.values(0, 1) == 0.0);
  CHECK(p.values(0, 2) == 0.0);
  CHECK(p.values(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(predict(ideal_povm(3, 5), f), ValidationError);
}

TEST_CASE("property: predict(ideal) reproduces the analytic probabilities") {
  const auto d = grid41();
  const auto p = predict(ideal_povm(7, 9), build_design_matrix(d, 9));
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (int n = 0; n < 7; ++n) {
      CHECK(std::abs(p.values(static_cast<Eigen::Index>(i), n) - ideal_probability(n, d[i] * 2.5, 2.5)) < 1e-12);
    }
  }
}

TEST_CASE("property: self-consistency with D >= 4M") {
  std::vector<double> d;
  for (int i = 0; i < 48; ++i) d.push_back(-3.2 + 6.4 * i / 47);
  for (std::uint64_t seed = 100; seed < 104; ++seed) {
    const int m = 6 + static_cast<int>(seed % 3);
    const auto f = build_design_matrix(d, m);
    const auto truth = from_oracle(oracle::random_povm(4, m, seed));
    const auto r = reconstruct(predict(truth, f), f, config(m));
    CHECK((r.povm.theta - truth.theta).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("born_probability: reference values") {
  const auto ideal = ideal_povm(3, 4);
  CHECK(born_probability(ideal, 1, PureState::basis(4, 1)) == 1.0);
  CHECK(born_probability(ideal, 1, PureState::basis(4, 2)) == 0.0);
  PovmSet half;
  half.theta = Eigen::MatrixXd::Zero(2, 4);
  half.theta(0, 0) = half.theta(0, 1) = 0.5;
  CHECK(born_probability(half, 0, PureState::basis(4, 0)) == 0.5);
  CHECK_THROWS_AS(born_probability(ideal, 3, PureState::basis(4, 0)), ValidationError);
  CHECK_THROWS_AS(born_probability(ideal, 0, PureState::basis(3, 0)), ValidationError);
}

TEST_CASE("born_probability: superposition and full model agree") {
  Eigen::VectorXcd c(3);
  c << std::complex<double>(0.6, 0.0), std::complex<double>(0.0, 0.8), 0.0;
  const PureState s(c);
  PovmSet diag;
  diag.theta = Eigen::MatrixXd(1, 3);
  diag.theta << 0.2, 0.7, 1.0;
  PovmSet full;
  full.model = PovmModel::full;
  full.elements.push_back(diag.theta.row(0).asDiagonal());
  const double expected = 0.2 * 0.36 + 0.7 * 0.64;
  CHECK(born_probability(diag, 0, s) == doctest::Approx(expected));
  CHECK(born_probability(full, 0, s) == doctest::Approx(expected));
  Eigen::VectorXcd bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{bad}, ValidationError);
}

TEST_CASE("r_squared: reference values") {
  Eigen::MatrixXd p(2, 2), q(2, 2);
  p << 0, 1, 1, 0;
  q << 0.1, 0.9, 0.8, 0.2;
  CHECK(r_squared(p, p) == doctest::Approx(1.0));
  CHECK(r_squared(p, (3.0 * p.array() + 0.5).matrix()) == doctest::Approx(1.0));
  CHECK(r_squared(p, q) == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(r_squared(p, q) == doctest::Approx(oracle::pearson_sq({0, 1, 1, 0}, {0.1, 0.8, 0.9, 0.2})).epsilon(1e-12));
  CHECK_THROWS_AS(r_squared(Eigen::MatrixXd::Constant(2, 2, 0.3), q), UndefinedStatisticError);
  CHECK_THROWS_AS(r_squared(p, Eigen::MatrixXd(3, 2)), ValidationError);
}

TEST_CASE("similarity: reference values") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK(similarity(eye, eye) == doctest::Approx(1.0));
  CHECK(similarity(eye, flat) == doctest::Approx(0.5));
  Eigen::MatrixXd other(2, 2);
  other << 0, 1, 1, 0;
  CHECK(similarity(eye, other) == 0.0);
  CHECK_THROWS_AS(similarity(eye, Eigen::MatrixXd::Zero(2, 2)), ValidationError);
  CHECK_THROWS_AS(similarity(eye, Eigen::MatrixXd::Identity(3, 3)), ValidationError);
  CHECK(similarity(ideal_povm(3, 5), ideal_povm(3, 5)) == doctest::Approx(1.0));
}

TEST_CASE("property: similarity bounds and proportionality") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd a(3, 4), b(3, 4);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = u(rng);
      b.data()[i] = u(rng);
    }
    const double s = similarity(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(similarity(a, (2.7 * a).eval()) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ideal_povm and similarity_to_ideal") {
  const auto p = ideal_povm(2, 3);
  CHECK(p.reference);
  Eigen::MatrixXd expected(2, 3);
  expected << 1, 0, 0, 0, 1, 0;
  CHECK(p.theta == expected);
  CHECK_THROWS_AS(ideal_povm(3, 2), ValidationError);

  // Tail columns k >= N do not count.
  PovmSet r;
  r.theta = Eigen::MatrixXd::Zero(2, 4);
  r.theta(0, 0) = r.theta(1, 1) = 1.0;
  r.theta(0, 2) = r.theta(1, 3) = 0.5;
  r.theta(1, 2) = r.theta(0, 3) = 0.5;
  CHECK(similarity_to_ideal(r) == doctest::Approx(1.0));
}
