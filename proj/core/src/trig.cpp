#include "kdesketch/trig.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace kdesketch {

namespace {

constexpr double kTwoOverPi = 6.36619772367581382433e-01;
// pi/2 split into a 33-bit head and tails (fdlibm-style constants), so that
// k * head is exact for |k| < 2^20.
constexpr double kPio2Hi = 1.57079632673412561417e+00;
constexpr double kPio2Mid = 6.07710050650619224932e-11;
constexpr double kPio2Lo = 2.02226624879595063154e-21;

// Minimax kernels on [-pi/4, pi/4].
constexpr double S1 = -1.66666666666666324348e-01;
constexpr double S2 = 8.33333333332248946124e-03;
constexpr double S3 = -1.98412698298579493134e-04;
constexpr double S4 = 2.75573137070700676789e-06;
constexpr double S5 = -2.50507602534068634195e-08;
constexpr double S6 = 1.58969099521155010221e-10;

constexpr double C1 = 4.16666666666666019037e-02;
constexpr double C2 = -1.38888888888741095749e-03;
constexpr double C3 = 2.48015872894767294178e-05;
constexpr double C4 = -2.75573143513906633035e-07;
constexpr double C5 = 2.08757232129817482790e-09;
constexpr double C6 = -1.13596475577881948265e-11;

inline double sin_kernel(double r) {
    const double z = r * r;
    return r + r * z * (S1 + z * (S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)))));
}

inline double cos_kernel(double r) {
    const double z = r * r;
    return 1.0 - 0.5 * z + z * z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6)))));
}

struct Reduced {
    double r;
    std::int64_t q;  // quadrant, k mod 4
};

inline Reduced reduce(double x) {
    const double k = std::nearbyint(x * kTwoOverPi);
    const double r = ((x - k * kPio2Hi) - k * kPio2Mid) - k * kPio2Lo;
    return {r, static_cast<std::int64_t>(k) & 3};
}

}  // namespace

void sincos_batch(std::span<const double> x, std::span<double> sin_out,
                  std::span<double> cos_out) {
    if (sin_out.size() != x.size() || cos_out.size() != x.size()) {
        throw std::invalid_argument("sincos_batch: output size mismatch");
    }
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Reduced rd = reduce(x[i]);
        const double s = sin_kernel(rd.r);
        const double c = cos_kernel(rd.r);
        const bool swap = (rd.q & 1) != 0;
        const double ss = swap ? c : s;
        const double cc = swap ? s : c;
        const double sgn_s = (rd.q & 2) ? -1.0 : 1.0;
        const double sgn_c = ((rd.q + 1) & 2) ? -1.0 : 1.0;
        sin_out[i] = sgn_s * ss;
        cos_out[i] = sgn_c * cc;
    }
}

void cos_batch(std::span<const double> x, std::span<double> cos_out) {
    if (cos_out.size() != x.size()) throw std::invalid_argument("cos_batch: output size mismatch");
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Reduced rd = reduce(x[i]);
        const double s = sin_kernel(rd.r);
        const double c = cos_kernel(rd.r);
        const double cc = (rd.q & 1) ? s : c;
        cos_out[i] = (((rd.q + 1) & 2) ? -1.0 : 1.0) * cc;
    }
}

void psi_into(std::span<const double> v, std::span<double> out) {
    const std::size_t n = v.size();
    if (n == 0) throw std::invalid_argument("psi: empty input");
    if (out.size() != 2 * n) throw std::invalid_argument("psi: output size mismatch");
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Reduced rd = reduce(v[i]);
        const double s = sin_kernel(rd.r);
        const double c = cos_kernel(rd.r);
        const bool swap = (rd.q & 1) != 0;
        const double ss = swap ? c : s;
        const double cc = swap ? s : c;
        const double sgn_s = (rd.q & 2) ? -inv : inv;
        const double sgn_c = ((rd.q + 1) & 2) ? -inv : inv;
        out[2 * i] = sgn_c * cc;
        out[2 * i + 1] = sgn_s * ss;
    }
}

std::vector<double> psi(std::span<const double> v) {
    std::vector<double> out(2 * v.size());
    psi_into(v, out);
    return out;
}

}  // namespace kdesketch
