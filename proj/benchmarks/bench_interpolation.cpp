#include <benchmark/benchmark.h>

#include <random>

#include "sparseloc/delaunay.hpp"
#include "sparseloc/interpolation.hpp"

using namespace sparseloc;

namespace {

std::vector<Sample> scattered(std::size_t n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-15, 0), uy(-28, 0), un(0, 3);
  std::vector<Sample> s;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng), y = uy(rng);
    s.push_back({static_cast<double>(i), x, y, -std::hypot(x + 7.5, y + 14) + un(rng)});
  }
  return s;
}

void BM_Delaunay(benchmark::State& state) {
  const auto d = deduplicate(scattered(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(delaunay_triangulate(d.points));
}
BENCHMARK(BM_Delaunay)->Arg(100)->Arg(400)->Arg(1600);

void BM_BiharmonicField(benchmark::State& state) {
  const auto s = scattered(static_cast<std::size_t>(state.range(0)));
  const auto spec = FieldSpec::over_bounds({{-15, -28}, {0, 0}}, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(interpolate_biharmonic(s, spec));
}
BENCHMARK(BM_BiharmonicField)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_CubicField(benchmark::State& state) {
  const auto s = scattered(static_cast<std::size_t>(state.range(0)));
  const auto spec = FieldSpec::over_bounds({{-15, -28}, {0, 0}}, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(interpolate_cubic(s, spec));
}
BENCHMARK(BM_CubicField)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
