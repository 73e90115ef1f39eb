// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "gkdv/airy.hpp"
#include "gkdv/kernels.hpp"
#include "gkdv/littlewood_paley.hpp"
#include "gkdv/random.hpp"

namespace {

using namespace gkdv;

struct Sample {
  GridSpec grid;
  std::vector<Complex> spectra;
  std::size_t n;
};

Sample make_sample(std::size_t points, std::size_t snapshots) {
  Sample s;
  s.grid.length = 200.0;
  s.grid.points = points;
  s.grid.dt = 0.01;
  s.grid.steps = snapshots - 1;
  s.n = snapshots;
  Rng rng(derive_seed(11, points));
  const Spectrum phi = forward_transform(random_band_limited(s.grid, 0.5, 8.0, rng));
  for (std::size_t k = 0; k < snapshots; ++k) {
    const Spectrum sk = evolve(phi, s.grid.time(k));
    s.spectra.insert(s.spectra.end(), sk.coeffs.begin(), sk.coeffs.end());
  }
  return s;
}

kernels::Exec mode(const benchmark::State& state) {
  return state.range(0) == 0 ? kernels::Exec::serial : kernels::Exec::parallel;
}

void BM_BandV2Norms(benchmark::State& state) {
  static const Sample s = make_sample(4096, 24);
  const Band band{ceil_exponent(0.5), floor_exponent(8.0)};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::band_v2_norms(s.spectra, s.n, s.grid, band, true, mode(state)));
}
BENCHMARK(BM_BandV2Norms)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_BandLqNorm(benchmark::State& state) {
  static const Sample s = make_sample(4096, 48);
  const int z = floor_exponent(3.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::band_lq_norm(s.spectra, s.n, s.grid, z, 6.0, mode(state)));
}
BENCHMARK(BM_BandLqNorm)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_PairwiseDistances(benchmark::State& state) {
  const std::size_t n = 64, dim = 8192;
  std::vector<double> rows(n * dim);
  Rng rng(3);
  std::normal_distribution<double> nd;
  for (auto& v : rows) v = nd(rng);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::pairwise_sq_distances(rows, n, dim, 1.0, mode(state)));
}
BENCHMARK(BM_PairwiseDistances)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
