#include <benchmark/benchmark.h>

#include <vector>

#include "kdesketch/features.hpp"
#include "kdesketch/rng.hpp"
#include "kdesketch/trig.hpp"

namespace {

using namespace kdesketch;

std::vector<double> random_point(std::size_t d, double scale) {
    RandomStream rs(7, "bench");
    std::vector<double> x(d);
    for (auto& v : x) v = scale * rs.normal();
    return x;
}

void BM_sincos_batch(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto x = random_point(n, 30.0);
    std::vector<double> s(n), c(n);
    for (auto _ : state) {
        sincos_batch(x, s, c);
        benchmark::DoNotOptimize(s.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}

void BM_compose(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    EmbeddingConstants consts;
    consts.log_exponent = static_cast<int>(state.range(1));
    const auto params = EmbeddingParams::for_kde(d, 0.25, 1e-4, 4.0, 3, consts);
    ComposedMap map(params);
    FeatureScratch scratch;
    const auto x = random_point(d, 0.5);
    std::vector<double> out(map.output_dim());
    for (auto _ : state) {
        map.compose(x, out, scratch);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["m"] = static_cast<double>(params.m);
}

void BM_rff(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    const std::size_t nf = static_cast<std::size_t>(state.range(1));
    RffMap map({5, "W"}, nf, d, 1.0);
    FeatureScratch scratch;
    const auto x = random_point(d, 0.5);
    std::vector<double> out(map.output_dim());
    for (auto _ : state) {
        map.features(x, out, scratch);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_sincos_batch)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_compose)
    ->Args({1 << 10, 0})
    ->Args({1 << 14, 0})
    ->Args({1 << 16, 0})
    ->Args({1 << 10, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rff)->Args({1 << 16, 48})->Args({1 << 10, 1024})->Unit(benchmark::kMillisecond);
