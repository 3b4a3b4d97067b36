#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace kdesketch {

// A (value, stream_label) pair names one deterministic random stream.
// Identical pairs reproduce identical draws across runs, platforms and
// thread counts.
struct RngSeed {
    std::uint64_t value = 0;
    std::string stream_label;
};

// Quantile function of the standard normal, Wichura's AS 241 (PPND16).
// Accurate to ~1e-15 over p in (0, 1).
double inverse_normal_cdf(double p);

// Counter-free splittable stream: SplitMix64 over a state derived from
// (seed value, FNV-1a hash of the label). All floating-point outputs go
// through fixed deterministic maps (inverse CDFs), never platform RNG.
class RandomStream {
public:
    explicit RandomStream(const RngSeed& seed)
        : RandomStream(seed.value, seed.stream_label) {}
    RandomStream(std::uint64_t value, std::string_view label);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform01();

    // Standard normal via inverse-CDF from one uniform draw.
    double normal();

    // Laplace(0, b) via inverse-CDF from one uniform draw. Requires b > 0.
    double laplace(double b);

    // Uniform integer in [0, n). Requires n >= 1.
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
};

// Derives a fresh 64-bit seed value from a master value and an index,
// used for per-trial / per-bank substreams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace kdesketch
