#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "kdesketch/features.hpp"
#include "kdesketch/rng.hpp"
#include "kdesketch/trig.hpp"

using namespace kdesketch;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm_sq(std::span<const double> v) { return dot(v, v); }

std::vector<double> random_vec(RandomStream& rs, std::size_t d, double scale = 1.0) {
    std::vector<double> v(d);
    for (auto& x : v) x = scale * rs.normal();
    return v;
}

EmbeddingConstants fast_consts() {
    EmbeddingConstants c;
    c.log_exponent = 0;  // small m keeps unit tests quick
    return c;
}

}  // namespace

TEST_CASE("embedding params: derivation and clamping") {
    const auto p = EmbeddingParams::for_kde(8, 0.25, 0.01, 2.0, 7);
    CHECK(p.m >= 8);
    CHECK((p.m & (p.m - 1)) == 0);
    CHECK(p.s == doctest::Approx(std::sqrt(0.25 / (4.0 * std::log(4.0)))));
    CHECK(p.lambda == doctest::Approx(2.0 * p.s * 2.0));
    CHECK(p.output_dim() == 4 * p.m);

    // epsilon above 1/2 is accepted but treated as 1/2
    const auto clamped = EmbeddingParams::for_kde(8, 0.9, 0.01, 2.0, 7);
    CHECK(clamped.epsilon == 0.5);

    CHECK_THROWS_AS(EmbeddingParams::for_kde(8, -0.1, 0.01, 2.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(EmbeddingParams::for_kde(8, 0.25, 1.5, 2.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(EmbeddingParams::for_embedding(8, 0.25, 0.01, -1.0, 7),
                    std::invalid_argument);
}

TEST_CASE("outer subsampling caps at 2m") {
    EmbeddingConstants c = fast_consts();
    c.outer_subsample = true;
    const auto p = EmbeddingParams::for_kde(8, 0.25, 0.01, 2.0, 7, c);
    CHECK(p.ell_out > 0);
    CHECK(p.ell_out <= 2 * p.m);
    CHECK(p.output_dim() == 2 * p.ell_out);
}

TEST_CASE("phi: unit norm, determinism, distance identity") {
    const auto params = EmbeddingParams::for_kde(16, 0.25, 0.01, 2.0, 3, fast_consts());
    ComposedMap map(params);
    FeatureScratch scratch;
    RandomStream rs(5, "xy");

    const auto x = random_vec(rs, 16, 0.4);
    const auto y = random_vec(rs, 16, 0.4);

    std::vector<double> fx(2 * params.m), fx2(2 * params.m), fy(2 * params.m);
    map.phi(x, fx, scratch);
    map.phi(x, fx2, scratch);
    map.phi(y, fy, scratch);
    CHECK(fx == fx2);
    CHECK(norm_sq(fx) == doctest::Approx(1.0).epsilon(1e-12));

    // ||Phi(x)-Phi(y)||^2 == (2/m) sum (1 - cos((Vz)_j)), via independent libm cos.
    std::vector<double> z(16);
    for (std::size_t i = 0; i < 16; ++i) z[i] = x[i] - y[i];
    std::vector<double> vz(params.m);
    map.inner_transform(z, vz);
    double rhs = 0.0;
    for (double v : vz) rhs += 1.0 - std::cos(v);
    rhs *= 2.0 / static_cast<double>(params.m);

    double lhs = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) {
        const double d = fx[i] - fy[i];
        lhs += d * d;
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("phi rejects non-finite input") {
    const auto params = EmbeddingParams::for_kde(4, 0.25, 0.01, 1.0, 3, fast_consts());
    ComposedMap map(params);
    FeatureScratch scratch;
    std::vector<double> bad = {1.0, std::nan(""), 0.0, 0.0};
    std::vector<double> out(2 * params.m);
    CHECK_THROWS_AS(map.phi(bad, out, scratch), std::invalid_argument);
}

TEST_CASE("spherical embedding lies on the 1/s sphere and rescales distances") {
    const auto params = EmbeddingParams::for_kde(8, 0.25, 0.01, 2.0, 11, fast_consts());
    ComposedMap map(params);
    FeatureScratch scratch;
    RandomStream rs(6, "xy");
    const auto x = random_vec(rs, 8);
    const auto y = random_vec(rs, 8);

    std::vector<double> px(2 * params.m), py(2 * params.m);
    map.spherical(x, px, scratch);
    map.spherical(y, py, scratch);
    CHECK(std::sqrt(norm_sq(px)) == doctest::Approx(1.0 / params.s).epsilon(1e-9));

    // Psi distances = Phi(s.) distances / s, and never exceed the diameter 2/s.
    std::vector<double> sx(x), sy(y);
    for (auto& v : sx) v *= params.s;
    for (auto& v : sy) v *= params.s;
    std::vector<double> fx(2 * params.m), fy(2 * params.m);
    map.phi(sx, fx, scratch);
    map.phi(sy, fy, scratch);
    double phi_d = 0.0, psi_d = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) {
        phi_d += (fx[i] - fy[i]) * (fx[i] - fy[i]);
        psi_d += (px[i] - py[i]) * (px[i] - py[i]);
    }
    CHECK(psi_d == doctest::Approx(phi_d / (params.s * params.s)).epsilon(1e-9));
    CHECK(std::sqrt(psi_d) <= 2.0 / params.s + 1e-9);
}

TEST_CASE("composed map K: unit norm and k(x,x) = 1") {
    for (bool subsample : {false, true}) {
        EmbeddingConstants c = fast_consts();
        c.outer_subsample = subsample;
        const auto params = EmbeddingParams::for_kde(8, 0.25, 0.01, 2.0, 13, c);
        ComposedMap map(params);
        FeatureScratch scratch;
        RandomStream rs(7, "x");
        const auto x = random_vec(rs, 8, 0.5);
        std::vector<double> kx(params.output_dim());
        map.compose(x, kx, scratch);
        CHECK(norm_sq(kx) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("composed map estimates exp(-||x-y||^2) over fresh seeds") {
    // ||x - y|| = 1, eps = 0.25: mean inner product within 3 eps of e^{-1}.
    const double eps = 0.25;
    std::vector<double> x(8, 0.0), y(8, 0.0);
    y[0] = 1.0;
    double acc = 0.0;
    const std::size_t seeds = 200;
    FeatureScratch scratch;
    for (std::size_t t = 0; t < seeds; ++t) {
        const auto params =
            EmbeddingParams::for_kde(8, eps, 0.01, 2.0, derive_seed(1001, t), fast_consts());
        ComposedMap map(params);
        std::vector<double> kx(params.output_dim()), ky(params.output_dim());
        map.compose(x, kx, scratch);
        map.compose(y, ky, scratch);
        acc += dot(kx, ky);
    }
    const double mean = acc / static_cast<double>(seeds);
    CHECK(std::fabs(mean - std::exp(-1.0)) <= 3.0 * eps);
    // The Monte-Carlo mean is much tighter than the worst-case bound.
    CHECK(std::fabs(mean - std::exp(-1.0)) <= 0.05);
}

TEST_CASE("translation invariance of embedded distances") {
    const auto params = EmbeddingParams::for_kde(8, 0.25, 0.01, 2.0, 17, fast_consts());
    ComposedMap map(params);
    FeatureScratch scratch;
    RandomStream rs(9, "xyt");
    const auto x = random_vec(rs, 8, 0.3);
    const auto y = random_vec(rs, 8, 0.3);
    const auto t = random_vec(rs, 8, 0.5);

    std::vector<double> fx(2 * params.m), fy(2 * params.m);
    map.phi(x, fx, scratch);
    map.phi(y, fy, scratch);
    double d1 = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) d1 += (fx[i] - fy[i]) * (fx[i] - fy[i]);

    std::vector<double> xt(x), yt(y);
    for (std::size_t i = 0; i < 8; ++i) {
        xt[i] += t[i];
        yt[i] += t[i];
    }
    map.phi(xt, fx, scratch);
    map.phi(yt, fy, scratch);
    double d2 = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) d2 += (fx[i] - fy[i]) * (fx[i] - fy[i]);
    CHECK(std::sqrt(d1) == doctest::Approx(std::sqrt(d2)).epsilon(1e-10));
}

TEST_CASE("diagnostics: Q and W bounds on the distance") {
    RandomStream rs(41, "diag");
    for (std::size_t t = 0; t < 40; ++t) {
        const auto params =
            EmbeddingParams::for_kde(8, 0.25, 0.01, 2.0, derive_seed(55, t), fast_consts());
        const auto x = random_vec(rs, 8, 0.3);
        auto y = x;
        if (t % 4 != 0) y = random_vec(rs, 8, 0.3);
        const auto diag = embedding_diagnostics(params, x, y);
        if (t % 4 == 0) {
            CHECK(diag.Q == 0.0);
            CHECK(diag.W == 0.0);
            CHECK(diag.dist_sq == 0.0);
        }
        CHECK(diag.dist_sq <= diag.Q + 1e-12);
        CHECK(diag.dist_sq >= diag.Q - diag.W / 12.0 - 1e-12);
    }
}

TEST_CASE("expectation of the cosine mean is exp(-||z||^2/2) for fixed B") {
    const std::size_t m = 256;
    const double z_norm = 1.0;
    const auto B = sample_sign_diagonal({71, "B1"}, m);
    std::vector<double> z(m, 0.0);
    z[0] = z_norm;

    const std::size_t draws = 2000;
    double acc = 0.0;
    std::vector<double> buf(m), cosv(m);
    for (std::size_t t = 0; t < draws; ++t) {
        const auto G = sample_gaussian_diagonal({derive_seed(72, t), "G1"}, m);
        buf = z;
        apply_fastfood(B, G, buf);
        cos_batch(buf, cosv);
        double mean_cos = 0.0;
        for (double cv : cosv) mean_cos += cv;
        acc += mean_cos / static_cast<double>(m);
    }
    const double mean = acc / static_cast<double>(draws);
    CHECK(mean == doctest::Approx(std::exp(-z_norm * z_norm / 2.0)).epsilon(0.02));
}

TEST_CASE("rff features: norm, self-product, kernel consistency") {
    RandomStream rs(81, "x");
    const auto x = random_vec(rs, 6);
    const auto fx = rff_features({3, "W"}, 64, 1.0, x);
    CHECK(norm_sq(fx) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dot(fx, fx) == doctest::Approx(1.0).epsilon(1e-12));

    // ||x-y|| = 1, sigma = 1, 2000 features: inner product near e^{-1}.
    std::vector<double> a(6, 0.0), b(6, 0.0);
    b[0] = 1.0;
    std::size_t hits = 0;
    const std::size_t seeds = 100;
    for (std::size_t t = 0; t < seeds; ++t) {
        const RngSeed seed{derive_seed(91, t), "W"};
        const auto fa = rff_features(seed, 2000, 1.0, a);
        const auto fb = rff_features(seed, 2000, 1.0, b);
        if (std::fabs(dot(fa, fb) - std::exp(-1.0)) <= 0.05) ++hits;
    }
    CHECK(hits >= 95);
}

TEST_CASE("fjlt+rff features: norm, self-product, kernel consistency") {
    RandomStream rs(82, "x");
    const auto x = random_vec(rs, 24);
    const auto fx = fjlt_rff_features(5, 16, x);
    CHECK(norm_sq(fx) == doctest::Approx(1.0).epsilon(1e-12));

    const double eps = 0.25;
    const std::size_t d_eps = static_cast<std::size_t>(std::ceil(1.0 / (eps * eps)));
    std::vector<double> a(24, 0.0), b(24, 0.0);
    b[0] = 1.0;
    std::size_t hits = 0;
    const std::size_t seeds = 100;
    for (std::size_t t = 0; t < seeds; ++t) {
        const std::uint64_t seed = derive_seed(92, t);
        const auto fa = fjlt_rff_features(seed, d_eps, a);
        const auto fb = fjlt_rff_features(seed, d_eps, b);
        if (std::fabs(dot(fa, fb) - std::exp(-1.0)) <= 4.0 * eps) ++hits;
    }
    CHECK(hits >= 90);
}

TEST_CASE("rff_feature_count arithmetic") {
    CHECK(rff_feature_count(0.25, 0.1) == 16 * 3);
    CHECK(rff_feature_count(0.1, 0.01) == 100 * 5);
}
