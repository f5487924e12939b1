#include <benchmark/benchmark.h>

#include <vector>

#include "random_matrices.hpp"
#include "schatten/divided_difference.hpp"
#include "schatten/embedding.hpp"
#include "schatten/moi.hpp"
#include "schatten/spectral.hpp"

using namespace schatten;

static void BM_SpectralDecompose(benchmark::State& state) {
    schatten::testing::Rng rng(1);
    const auto h = schatten::testing::random_hermitian(static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(h));
}
BENCHMARK(BM_SpectralDecompose)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_SchattenNormPow(benchmark::State& state) {
    schatten::testing::Rng rng(2);
    const auto h = schatten::testing::random_hermitian(static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(schatten_norm_pow(h, 0.5));
}
BENCHMARK(BM_SchattenNormPow)->Arg(2)->Arg(4)->Arg(8);

static void BM_DividedDifference(benchmark::State& state) {
    const auto f = ScalarSymbol::abs_power(0.5, 0.1);
    const std::vector<double> nodes{0.4, 0.4, 0.9, 1.3, 1.3, 2.0};
    for (auto _ : state) benchmark::DoNotOptimize(divided_difference(f, nodes));
}
BENCHMARK(BM_DividedDifference);

static void BM_MoiApply(benchmark::State& state) {
    const auto slots = static_cast<std::size_t>(state.range(0));
    const std::size_t dim = 4;
    schatten::testing::Rng rng(3);
    const auto phi = MultiSymbol::divided_difference(ScalarSymbol::exponential(), slots);
    std::vector<ComplexMatrix> ops(slots + 1, schatten::testing::random_hermitian(dim, rng));
    std::vector<ComplexMatrix> bs;
    for (std::size_t j = 0; j < slots; ++j) bs.push_back(schatten::testing::random_hermitian(dim, rng));
    for (auto _ : state) benchmark::DoNotOptimize(moi_apply(phi, ops, bs));
}
BENCHMARK(BM_MoiApply)->Arg(1)->Arg(2)->Arg(3);

static void BM_IqpResidual(benchmark::State& state) {
    schatten::testing::Rng rng(4);
    const EmbeddingInstance inst{1.0, 0.3, ComplexMatrix::diagonal({0.6, -0.3}),
                                 schatten::testing::random_hermitian(2, rng), {}};
    for (auto _ : state) benchmark::DoNotOptimize(iqp_residual(inst));
}
BENCHMARK(BM_IqpResidual);

static void BM_FalsifyRestarts(benchmark::State& state) {
    SearchConfig cfg;
    cfg.restarts = static_cast<std::size_t>(state.range(0));
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(falsify(0.5, 0.25, 2, cfg));
}
BENCHMARK(BM_FalsifyRestarts)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
