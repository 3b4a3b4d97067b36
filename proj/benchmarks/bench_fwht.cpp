#include <benchmark/benchmark.h>

#include <vector>

#include "kdesketch/hadamard.hpp"
#include "kdesketch/rng.hpp"

namespace {

void BM_fwht(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    std::vector<double> v(m);
    kdesketch::RandomStream rs(1, "bench");
    for (auto& x : v) x = rs.normal();
    for (auto _ : state) {
        kdesketch::fwht(v);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(m));
}

}  // namespace

BENCHMARK(BM_fwht)->RangeMultiplier(4)->Range(1 << 10, 1 << 20)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
