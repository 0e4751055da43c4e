// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "pimsbo/parallel.hpp"
#include "pimsbo/rng.hpp"
#include "pimsbo/sampling.hpp"

namespace {

using namespace pimsbo;

PointMatrix random_points(Index n, Index d, std::uint64_t seed) {
  Rng rng = make_rng(seed, {0});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointMatrix p(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) p(i, j) = u(rng);
  return p;
}

GpPosterior fitted(Index n) {
  const PointMatrix x = random_points(n, 2, 1);
  Rng rng = make_rng(2, {0});
  Dataset data(x, standard_normal_vector(n, rng), 1e-6);
  return GpPosterior::fit(KernelSpec::rbf(0.2), data);
}

template <bool Parallel>
void BM_Gram(benchmark::State& state) {
  const PointMatrix a = random_points(state.range(0), 2, 3);
  const KernelSpec k = KernelSpec::matern(2.5, 0.2);
  for (auto _ : state) {
    Matrix g = Parallel ? kernels::gram(k, a, a) : kernels::serial::gram(k, a, a);
    benchmark::DoNotOptimize(g.data());
  }
}

template <bool Parallel>
void BM_PosteriorMoments(benchmark::State& state) {
  const GpPosterior post = fitted(100);
  const PointMatrix q = random_points(state.range(0), 2, 4);
  for (auto _ : state) {
    PosteriorMoments m = Parallel ? kernels::posterior_moments(post, q)
                                  : kernels::serial::posterior_moments(post, q);
    benchmark::DoNotOptimize(m.mean.data());
  }
}

template <bool Parallel>
void BM_RffFeatures(benchmark::State& state) {
  Rng rng = make_rng(5, {0});
  const FeatureMap fmap = build_rff(KernelSpec::rbf(0.2), 2, 2000, rng);
  const PointMatrix q = random_points(state.range(0), 2, 6);
  for (auto _ : state) {
    Matrix phi = Parallel ? kernels::rff_features(fmap, q) : kernels::serial::rff_features(fmap, q);
    benchmark::DoNotOptimize(phi.data());
  }
}

}  // namespace

BENCHMARK(BM_Gram<false>)->Arg(256)->Arg(1024);
BENCHMARK(BM_Gram<true>)->Arg(256)->Arg(1024);
BENCHMARK(BM_PosteriorMoments<false>)->Arg(225)->Arg(4096);
BENCHMARK(BM_PosteriorMoments<true>)->Arg(225)->Arg(4096);
BENCHMARK(BM_RffFeatures<false>)->Arg(225)->Arg(1024);
BENCHMARK(BM_RffFeatures<true>)->Arg(225)->Arg(1024);

BENCHMARK_MAIN();
