// Parallel kernels against their serial twins.

#include <benchmark/benchmark.h>

#include <cmath>

#include "mrif/kernels.hpp"
#include "mrif/radio.hpp"
#include "mrif/rng.hpp"
#include "mrif/scenario.hpp"

using namespace mrif;

namespace {

learn::Matrix random_rows(std::size_t n, std::size_t d) {
  Rng rng(n * 31 + d);
  learn::Matrix m(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) m(r, c) = rng.normal();
  return m;
}

std::vector<double> spd(std::size_t n) {
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] = std::exp(-std::abs(double(i) - double(j)) / 5.0) + (i == j ? 1e-9 : 0.0);
  return a;
}

template <auto Fn>
void cholesky(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = spd(n);
  for (auto _ : state) {
    auto l = a;
    Fn(l, n);
    benchmark::DoNotOptimize(l.data());
  }
}

template <auto Fn>
void knn(benchmark::State& state) {
  const auto ref = random_rows(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(ref, ref, 15, true));
}

template <auto Fn>
void radius(benchmark::State& state) {
  auto pts = random_rows(static_cast<std::size_t>(state.range(0)), 2);
  for (double& v : pts.values()) v *= 300.0;
  for (auto _ : state) benchmark::DoNotOptimize(Fn(pts, 100.0));
}

template <auto Fn>
void coverage(benchmark::State& state) {
  const auto layout = scenario::default_layout();
  const radio::ShadowMap shadow(layout, 1);
  const auto pts = radio::grid_points(layout.area, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(layout, pts, shadow));
}

}  // namespace

BENCHMARK(cholesky<static_cast<void (*)(std::span<double>, std::size_t)>(kernels::cholesky_lower)>)
    ->Name("cholesky/parallel")->Arg(400)->Arg(1200);
BENCHMARK(cholesky<static_cast<void (*)(std::span<double>, std::size_t)>(kernels::serial::cholesky_lower)>)
    ->Name("cholesky/serial")->Arg(400)->Arg(1200);
BENCHMARK(knn<kernels::knn>)->Name("knn/parallel")->Arg(1000)->Arg(4000);
BENCHMARK(knn<kernels::serial::knn>)->Name("knn/serial")->Arg(1000)->Arg(4000);
BENCHMARK(radius<kernels::radius_counts>)->Name("radius_counts/parallel")->Arg(2000);
BENCHMARK(radius<kernels::serial::radius_counts>)->Name("radius_counts/serial")->Arg(2000);
BENCHMARK(coverage<radio::evaluate_points>)->Name("coverage_points/parallel")->Arg(10)->Arg(5);
BENCHMARK(coverage<radio::serial::evaluate_points>)->Name("coverage_points/serial")->Arg(10)->Arg(5);

BENCHMARK_MAIN();
