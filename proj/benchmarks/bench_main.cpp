#include <vector>

#include <benchmark/benchmark.h>

#include "nbp/forward.hpp"
#include "nbp/inversion.hpp"
#include "nbp/kernel.hpp"
#include "nbp/phantoms.hpp"

using namespace nbp;

namespace {

Phantom bump() {
  Phantom p;
  p.components = {SmoothBump{{0.1, -0.05}, 0.5, 1.0, 1.0}};
  return p;
}

struct Disk {
  GridSpec grid;
  ScalarField2D f, d1, d2;
  DetectorArray det;
};

Disk disk(int n) {
  const auto g = GridSpec::covering_square(n, 1.0, {});
  auto [d1, d2] = rasterize_gradient(bump(), g);
  return {g, rasterize(bump(), g), std::move(d1), std::move(d2), build_circle_detectors(1.0, {}, g.spacing)};
}

// Neumann traces are cached per size; the oracle is the slow part.
const TraceMatrix& neumann_trace(int n) {
  static std::vector<std::pair<int, TraceMatrix>> cache;
  for (const auto& [k, t] : cache)
    if (k == n) return t;
  const auto d = disk(n);
  cache.emplace_back(n, solve_neumann_trace_oracle(d.f, d.d1, d.d2, d.det, d.grid.spacing, 16.0));
  return cache.back().second;
}

void BM_AccumulateAbel(benchmark::State& state) {
  const auto& t = neumann_trace(static_cast<int>(state.range(0)));
  const auto rule = state.range(1) == 0 ? AbelRule::kStep : AbelRule::kLinear;
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_abel(t, rule));
  state.SetLabel(to_string(rule));
}
BENCHMARK(BM_AccumulateAbel)->Args({101, 0})->Args({101, 1})->Args({201, 1})->Unit(benchmark::kMillisecond);

void BM_Backproject(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto A = accumulate_abel(neumann_trace(n), AbelRule::kLinear);
  const auto g = GridSpec::covering_square(n, 1.0, {});
  for (auto _ : state) benchmark::DoNotOptimize(backproject(A, g, 1.0));
}
BENCHMARK(BM_Backproject)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_OracleNeumann(benchmark::State& state) {
  const auto d = disk(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_neumann_trace_oracle(d.f, d.d1, d.d2, d.det, d.grid.spacing, 4.0));
}
BENCHMARK(BM_OracleNeumann)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_Spectral(benchmark::State& state) {
  const auto d = disk(static_cast<int>(state.range(0)));
  const auto f = embed_with_margin(d.f, 8);
  const TimeGrid time = TimeGrid::covering(d.grid.spacing, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_traces(f, d.det, time));
}
BENCHMARK(BM_Spectral)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_KernelField(benchmark::State& state) {
  const auto domain = ConvexDomain::smoothed_superellipse(1.0, 0.9);
  KernelOptions o;
  o.n_theta = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernel_field(domain, o));
}
BENCHMARK(BM_KernelField)->Arg(90)->Arg(360)->Unit(benchmark::kMillisecond);

void BM_ApplyK(benchmark::State& state) {
  const auto domain = ConvexDomain::smoothed_superellipse(1.0, 0.9);
  const auto k = kernel_field(domain);
  const auto g = GridSpec::covering_square(static_cast<int>(state.range(0)), 1.2, {});
  Phantom p;
  p.components = {SmoothBump{{0.5, 0.5}, 0.3, 1.0, 1.0}};
  const auto f = rasterize(p, g);
  for (auto _ : state) benchmark::DoNotOptimize(apply_K(f, domain, k, Vec2{0.4, 0.45}));
}
BENCHMARK(BM_ApplyK)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
