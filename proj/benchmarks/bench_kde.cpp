#include <benchmark/benchmark.h>

#include "kdesketch/kde.hpp"
#include "kdesketch/synthetic.hpp"

namespace {

using namespace kdesketch;

Dataset bench_data(std::size_t n, std::size_t d) {
    MixtureConfig mc;
    mc.n = n;
    mc.d = d;
    mc.delta_bound = 8.0;
    mc.seed = 11;
    return make_gaussian_mixture(mc);
}

void BM_build(benchmark::State& state) {
    const Dataset data = bench_data(static_cast<std::size_t>(state.range(0)), 64);
    SketchConfig config;
    config.epsilon = 0.25;
    config.delta = 0.1;
    config.seed = 3;
    config.consts.log_exponent = 0;
    for (auto _ : state) {
        const KdeSketch sketch = build_sketch(data, config);
        benchmark::DoNotOptimize(sketch.mean_features.data());
    }
}

void BM_query(benchmark::State& state) {
    const Dataset data = bench_data(512, static_cast<std::size_t>(state.range(0)));
    SketchConfig config;
    config.epsilon = 0.25;
    config.delta = 0.1;
    config.seed = 3;
    config.consts.log_exponent = 0;
    const KdeSketch sketch = build_sketch(data, config);
    const std::vector<double> y(data.d, 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(query(sketch, y));
    }
}

}  // namespace

BENCHMARK(BM_build)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_query)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);
