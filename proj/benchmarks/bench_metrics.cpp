#include <benchmark/benchmark.h>

#include "dmetrics/paths.hpp"

namespace {

using namespace dmetrics;

void BM_ApollonianDisk(benchmark::State& state) {
  const auto disk = Domain::ball({0.0, 0.0}, 1.0);
  const auto atlas = disk.boundary_samples(static_cast<std::size_t>(state.range(0)));
  const Point x{0.1, 0.2};
  const Point y{-0.4, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(apollonian(disk, x, y, atlas));
}
BENCHMARK(BM_ApollonianDisk)->Arg(1'000)->Arg(10'000)->Arg(100'000);

void BM_SampledSupsSlit(benchmark::State& state) {
  const auto slit = Domain::slit_disk({0.0, 0.0}, 1.0, {0.0, 0.0}, {1.0, 0.0});
  const auto atlas = slit.boundary_samples(10'000);
  const Point x{0.5, 0.01};
  const Point y{0.5, -0.01};
  for (auto _ : state) benchmark::DoNotOptimize(apollonian_sampled(atlas, x.coords(), y.coords()));
}
BENCHMARK(BM_SampledSupsSlit);

void BM_BuildGridDisk(benchmark::State& state) {
  const auto disk = Domain::ball({0.0, 0.0}, 1.0);
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_grid(disk, h, disk.grid_window()));
}
BENCHMARK(BM_BuildGridDisk)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ShortestPath(benchmark::State& state) {
  const auto slit = Domain::slit_disk({0.0, 0.0}, 1.0, {0.0, 0.0}, {1.0, 0.0});
  const auto grid = build_grid(slit, 0.01, slit.grid_window());
  const auto weight = static_cast<WeightKind>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(shortest_path(grid, slit, {0.5, 0.1}, {0.5, -0.1}, weight));
  }
  state.SetLabel(std::string(to_string(weight)));
}
BENCHMARK(BM_ShortestPath)
    ->Arg(static_cast<int>(WeightKind::euclidean))
    ->Arg(static_cast<int>(WeightKind::quasihyperbolic))
    ->Unit(benchmark::kMillisecond);

void BM_InnerDiameter(benchmark::State& state) {
  const auto slit = Domain::slit_disk({0.0, 0.0}, 1.0, {0.0, 0.0}, {1.0, 0.0});
  const auto grid = build_grid(slit, 0.01, slit.grid_window());
  for (auto _ : state) {
    benchmark::DoNotOptimize(inner_diameter(slit, {0.5, 0.1}, {0.5, -0.1}, grid));
  }
}
BENCHMARK(BM_InnerDiameter)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
