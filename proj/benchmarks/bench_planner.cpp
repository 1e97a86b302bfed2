#include <benchmark/benchmark.h>

#include "sparseloc/coverage_planner.hpp"

using namespace sparseloc;

namespace {

const FieldMap kCourt{{{-15, -28}, {0, 0}}, {{{-10, -20}, {-6, -20}, {-6, -17}, {-10, -17}}}, 1.0};

void BM_Rasterize(benchmark::State& state) {
  FieldMap m = kCourt;
  m.cell_size = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(m));
}
BENCHMARK(BM_Rasterize)->Arg(1)->Arg(2)->Arg(4);

void BM_BuildBlocks(benchmark::State& state) {
  const auto g = rasterize(kCourt);
  for (auto _ : state) benchmark::DoNotOptimize(build_blocks(g, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BuildBlocks)->Arg(1)->Arg(4)->Arg(8);

void BM_PlanCoverage(benchmark::State& state) {
  const PlannerConfig cfg{1.0, 4, static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(plan_coverage(kCourt, cfg, 0.8, 0.75, {-14.5, -20.5}));
}
BENCHMARK(BM_PlanCoverage)->Arg(300)->Arg(700)->Arg(1550);

void BM_SelectCellSize(benchmark::State& state) {
  const std::vector<double> candidates{1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(select_cell_size(kCourt, candidates, 4, 700.0, 0.8, 0.75, {-14.5, -20.5}));
}
BENCHMARK(BM_SelectCellSize);

}  // namespace

BENCHMARK_MAIN();
