// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <vector>

#include "rfclt/kernels.hpp"
#include "rfclt/models.hpp"
#include "rfclt/spectral.hpp"

namespace {

using namespace rfclt;

struct FilterFixture {
  LatticeShape shape;
  InnovationLattice xi;
  std::vector<kernels::Tap> taps;
  std::vector<double> out;

  explicit FilterFixture(std::int64_t n)
      : shape(LatticeShape::cube(2, n)),
        xi(sample_innovations(make_stream({1, 0, 0}), InnovationSpec::standard_normal(), shape, {3, 3, 0})),
        out(shape.volume()) {
    for (std::int64_t a = 0; a <= 3; ++a) {
      for (std::int64_t b = 0; b <= 3; ++b) taps.push_back({Lag{a, b, 0}, 1.0 / (1.0 + a + b)});
    }
  }
};

template <bool Parallel>
void BM_LinearFilter(benchmark::State& state) {
  FilterFixture f(state.range(0));
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::linear_filter(f.xi, f.taps, f.shape, f.out);
    } else {
      kernels::serial::linear_filter(f.xi, f.taps, f.shape, f.out);
    }
    benchmark::DoNotOptimize(f.out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.shape.volume()));
}

template <bool Parallel>
void BM_RotatedSum(benchmark::State& state) {
  const LatticeShape shape = LatticeShape::cube(2, state.range(0));
  const auto sample = simulate(FieldModel::iid(2), shape, {2, 0, 0});
  const FrequencyPoint t = default_frequencies(2)[0];
  for (auto _ : state) {
    const auto s = Parallel ? kernels::omp::rotated_sum(shape, sample.values, t)
                            : kernels::serial::rotated_sum(shape, sample.values, t);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(shape.volume()));
}

template <bool Parallel>
void BM_FejerQuadrature(benchmark::State& state) {
  const DensityFn f = density_function(test_models::linear(2));
  const std::int64_t n = state.range(0);
  kernels::FejerGrid grid;
  grid.dim = 2;
  grid.n = {n, n, 1};
  grid.resolution = default_quadrature_resolution(LatticeShape::cube(2, n));
  const FrequencyPoint t = default_frequencies(2)[1];
  for (auto _ : state) {
    const double v = Parallel ? kernels::omp::fejer_quadrature(f, grid, t) : kernels::serial::fejer_quadrature(f, grid, t);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * grid.resolution[0] * grid.resolution[1]);
}

}  // namespace

BENCHMARK(BM_LinearFilter<false>)->Name("linear_filter/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_LinearFilter<true>)->Name("linear_filter/omp")->Arg(128)->Arg(512);
BENCHMARK(BM_RotatedSum<false>)->Name("rotated_sum/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_RotatedSum<true>)->Name("rotated_sum/omp")->Arg(128)->Arg(512);
BENCHMARK(BM_FejerQuadrature<false>)->Name("fejer_quadrature/serial")->Arg(16)->Arg(64);
BENCHMARK(BM_FejerQuadrature<true>)->Name("fejer_quadrature/omp")->Arg(16)->Arg(64);

BENCHMARK_MAIN();
