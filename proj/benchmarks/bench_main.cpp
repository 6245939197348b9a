#include <benchmark/benchmark.h>

#include "hgtomo/diffraction.hpp"
#include "hgtomo/hologram.hpp"
#include "hgtomo/modes.hpp"
#include "hgtomo/tomography.hpp"

using namespace hgtomo;

namespace {

void BM_far_field(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = GridGeometry::square(n, 16.0 / n);
  const auto input = hg_field({0, 2, 1.0}, grid);
  const ExperimentGeometry geo;
  for (auto _ : state) benchmark::DoNotOptimize(far_field(input, geo));
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_synthesize_mask(benchmark::State& state) {
  const auto grid = GridGeometry::square(1024, 1.0 / 64);
  const auto target = detection_target(3, 1.0, grid);
  const auto grating = GratingSpec::pixels(8, grid.dx, Modulation::exact_amplitude);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_mask(target, grating));
}

void BM_simulate_detector(benchmark::State& state) {
  const ExperimentGeometry geo;
  const SimulationConfig sim;
  const auto mod = state.range(0) ? Modulation::exact_amplitude : Modulation::phase_only;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_detector(2, mod, geo, sim));
}

void BM_reconstruct(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<double> d;
  for (int i = 0; i < 41; ++i) d.push_back(-3.0 + 0.15 * i);
  const auto f = build_design_matrix(d, m);
  const auto p = predict(ideal_povm(5, m), f);
  ReconstructionConfig cfg;
  cfg.basis_size = m;
  cfg.record_history = false;
  int iterations = 0;
  for (auto _ : state) {
    const auto r = reconstruct(p, f, cfg);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.povm.theta.data());
  }
  state.counters["solver_iterations"] = iterations;
}

void BM_project_to_simplex(benchmark::State& state) {
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.37 * static_cast<double>(i % 7) - 0.5;
  for (auto _ : state) {
    auto w = v;
    project_to_simplex(w);
    benchmark::DoNotOptimize(w.data());
  }
}

} // namespace

BENCHMARK(BM_far_field)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_synthesize_mask)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate_detector)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reconstruct)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_project_to_simplex)->Arg(5)->Arg(64);
BENCHMARK_MAIN();
