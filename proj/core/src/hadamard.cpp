#include "kdesketch/hadamard.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace kdesketch {

std::size_t next_pow2(std::size_t n) {
    if (n == 0) throw std::invalid_argument("next_pow2: n must be >= 1");
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fwht_unscaled(std::span<double> v) {
    const std::size_t m = v.size();
    if (!is_pow2(m)) {
        throw std::invalid_argument("fwht: length " + std::to_string(m) +
                                    " is not a power of two");
    }
    double* a = v.data();

    // h = 1: adjacent pairs, stride-2 walk.
    if (m >= 2) {
        for (std::size_t i = 0; i < m; i += 2) {
            const double x = a[i], y = a[i + 1];
            a[i] = x + y;
            a[i + 1] = x - y;
        }
    }
    // h = 2: unrolled so the compiler keeps both lanes in registers.
    if (m >= 4) {
        for (std::size_t i = 0; i < m; i += 4) {
            const double x0 = a[i], x1 = a[i + 1], y0 = a[i + 2], y1 = a[i + 3];
            a[i] = x0 + y0;
            a[i + 1] = x1 + y1;
            a[i + 2] = x0 - y0;
            a[i + 3] = x1 - y1;
        }
    }
    // Remaining levels vectorize over the contiguous j-loop.
    for (std::size_t h = 4; h < m; h <<= 1) {
        for (std::size_t i = 0; i < m; i += h << 1) {
            double* lo = a + i;
            double* hi = a + i + h;
            for (std::size_t j = 0; j < h; ++j) {
                const double x = lo[j], y = hi[j];
                lo[j] = x + y;
                hi[j] = x - y;
            }
        }
    }
}

void fwht(std::span<double> v) {
    fwht_unscaled(v);
    // Single final m^{-1/2} scale instead of per-level 2^{-1/2} factors.
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(v.size()));
    for (double& x : v) x *= inv_sqrt_m;
}

std::vector<double> zero_pad(std::span<const double> x, std::size_t m) {
    if (m < x.size()) {
        throw std::invalid_argument("zero_pad: target dimension " + std::to_string(m) +
                                    " < input dimension " + std::to_string(x.size()));
    }
    if (!is_pow2(m)) throw std::invalid_argument("zero_pad: target dimension must be a power of two");
    std::vector<double> out(m, 0.0);
    std::memcpy(out.data(), x.data(), x.size() * sizeof(double));
    return out;
}

}  // namespace kdesketch
