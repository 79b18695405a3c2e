#include <cmath>

#include <benchmark/benchmark.h>

#include "csgeo/analysis.hpp"
#include "csgeo/connection.hpp"
#include "csgeo/exprlang.hpp"
#include "csgeo/fixtures.hpp"
#include "csgeo/frames.hpp"
#include "csgeo/linalg.hpp"
#include "csgeo/reconstruct.hpp"

namespace {

constexpr double kPi = 3.141592653589793;

csgeo::InvariantConstants branch_constants() {
  csgeo::InvariantConstants k;
  k.beta = kPi / 3.0;
  k.alpha = kPi / 2.0;
  k.a = std::sqrt(2.0 / 7.0);
  k.b = 0.0;
  return k;
}

const csgeo::ReconstructedSurface& torus() {
  static const csgeo::ReconstructedSurface surf(
      csgeo::assemble_maurer_cartan(branch_constants()),
      csgeo::initial_adapted_frame(branch_constants()));
  return surf;
}

void bm_eval_jet2(benchmark::State& state) {
  const csgeo::Fixture& fx = csgeo::fixture_by_name("legendrian_torus");
  double u = 0.0;
  for (auto _ : state) {
    u += 1e-3;
    benchmark::DoNotOptimize(csgeo::expr::eval_jet2(fx.ast, u, 0.7));
  }
}
BENCHMARK(bm_eval_jet2);

void bm_adapted_frame(benchmark::State& state) {
  const csgeo::Fixture& fx = csgeo::fixture_by_name("legendrian_torus");
  const csgeo::Jet2 jet = csgeo::expr::eval_jet2(fx.ast, 0.4, 0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(csgeo::adapted_frame(jet));
  }
}
BENCHMARK(bm_adapted_frame);

void bm_reconstructed_jet(benchmark::State& state) {
  const csgeo::ReconstructedSurface& surf = torus();
  double u = 0.0;
  for (auto _ : state) {
    u += 1e-3;
    benchmark::DoNotOptimize(surf.jet(u, 0.7));
  }
}
BENCHMARK(bm_reconstructed_jet);

void bm_connection_table(benchmark::State& state) {
  const csgeo::ReconstructedSurface& surf = torus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(csgeo::connection_table(surf, 0.5, 0.7));
  }
}
BENCHMARK(bm_connection_table);

void bm_expm(benchmark::State& state) {
  const csgeo::MaurerCartan mc = csgeo::assemble_maurer_cartan(branch_constants());
  for (auto _ : state) {
    benchmark::DoNotOptimize(csgeo::expm(mc.A));
  }
}
BENCHMARK(bm_expm);

void bm_solve_constant_invariants(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(csgeo::solve_constant_invariants(kPi / 3.0));
  }
}
BENCHMARK(bm_solve_constant_invariants);

void bm_roundtrip_16(benchmark::State& state) {
  csgeo::GridSpec g;
  g.nu = g.nv = 16;
  g.extent_u = g.extent_v = 2.0 * kPi;
  g.periodic_u = g.periodic_v = false;
  csgeo::AnalysisOptions opts;
  opts.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        csgeo::roundtrip_verify(branch_constants(), g, opts));
  }
}
BENCHMARK(bm_roundtrip_16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
