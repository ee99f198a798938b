#include <benchmark/benchmark.h>

#include "skewbessel/analytic.hpp"
#include "skewbessel/pathsim.hpp"
#include "skewbessel/sampler.hpp"
#include "skewbessel/specfun.hpp"

namespace sb = skewbessel;

namespace {

const sb::ModelParams kAsym{1.5, 0.3, 1.0, 2.0};
const sb::Interval kUnit{-1.0, 1.0, 0.0};

void BM_Kummer(benchmark::State& st) {
  const double z = static_cast<double>(st.range(0)) - 50.0;
  for (auto _ : st) benchmark::DoNotOptimize(sb::kummer_1f1(0.3, 1.2, z));
}
BENCHMARK(BM_Kummer)->Arg(10)->Arg(49)->Arg(60)->Arg(350);

void BM_Gauss2F1(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sb::gauss_2f1(0.2, 0.7, 1.3, 0.9));
}
BENCHMARK(BM_Gauss2F1);

void BM_BesselK(benchmark::State& st) {
  const double z = static_cast<double>(st.range(0)) / 10.0;
  for (auto _ : st) benchmark::DoNotOptimize(sb::bessel_k(1.0 / 6.0, z));
}
BENCHMARK(BM_BesselK)->Arg(5)->Arg(50)->Arg(500);

void BM_DeriveExponents(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sb::derive_exponents(kAsym));
}
BENCHMARK(BM_DeriveExponents);

void BM_HarmonicH(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sb::harmonic_h(kAsym, 0.7, -0.4));
}
BENCHMARK(BM_HarmonicH);

void BM_ExitPositionDensity(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sb::exit_position_density_y0(kAsym, kUnit, 0.6));
}
BENCHMARK(BM_ExitPositionDensity);

void BM_ExitPositionLawBuild(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sb::exit_position_law_y0(kAsym, kUnit));
}
BENCHMARK(BM_ExitPositionLawBuild)->Unit(benchmark::kMillisecond);

void BM_SampleOvershoot(benchmark::State& st) {
  const sb::Exponents e = sb::derive_exponents(kAsym);
  sb::RngStream rng(1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(sb::sample_overshoot(kAsym, e, 1.0, rng));
}
BENCHMARK(BM_SampleOvershoot);

void BM_SampleExitSystem(benchmark::State& st) {
  const sb::ExitSystemSampler sampler(kAsym, kUnit);
  sb::RngStream rng(2, 0);
  for (auto _ : st) benchmark::DoNotOptimize(sampler(rng));
}
BENCHMARK(BM_SampleExitSystem);

void BM_SampleExitPosition(benchmark::State& st) {
  const sb::ExitPositionSampler sampler(kAsym, kUnit);
  sb::RngStream rng(3, 0);
  for (auto _ : st) benchmark::DoNotOptimize(sampler(rng));
}
BENCHMARK(BM_SampleExitPosition);

void BM_BesselSquaredStep(benchmark::State& st) {
  sb::RngStream rng(4, 0);
  double q = 0.1;
  for (auto _ : st) {
    q = sb::step_bessel_squared(q, 1.5, 1e-4, rng);
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_BesselSquaredStep);

void BM_PathToExit(benchmark::State& st) {
  sb::PathConfig cfg;
  cfg.dt = 1e-4;
  cfg.step_growth = 1e-4;
  const sb::StopSpec stop{sb::StopRule::level_passage, -1.0, 1.0};
  std::uint64_t i = 0;
  for (auto _ : st) {
    sb::RngStream rng(5, i++);
    benchmark::DoNotOptimize(sb::simulate_to_stop(kAsym, cfg, 0.0, 0.0, stop, rng));
  }
}
BENCHMARK(BM_PathToExit)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
