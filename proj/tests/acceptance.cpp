// Acceptance suite: one numbered check per criterion, one PASS/FAIL line each.
// Exit code is the number of failed criteria. Pass criterion numbers as argv
// to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "kdesketch/certify.hpp"
#include "kdesketch/dp.hpp"
#include "kdesketch/hadamard.hpp"
#include "kdesketch/imq.hpp"
#include "kdesketch/kde.hpp"
#include "kdesketch/reduction.hpp"
#include "kdesketch/rng.hpp"
#include "kdesketch/synthetic.hpp"
#include "kdesketch/threading.hpp"
#include "kdesketch/trig.hpp"

using namespace kdesketch;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> explicit_hadamard(std::size_t m) {
    std::vector<double> h = {1.0};
    for (std::size_t k = 1; k < m; k *= 2) {
        std::vector<double> next(4 * k * k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                const double v = h[i * k + j] / std::sqrt(2.0);
                next[i * 2 * k + j] = v;
                next[i * 2 * k + j + k] = v;
                next[(i + k) * 2 * k + j] = v;
                next[(i + k) * 2 * k + j + k] = -v;
            }
        }
        h = std::move(next);
    }
    return h;
}

// ---------------------------------------------------------------------------
// 1. FWHT correctness and runtime.
Outcome criterion1() {
    RandomStream rs(101, "c1");
    for (std::size_t m : {2u, 4u, 8u, 16u}) {
        const auto H = explicit_hadamard(m);
        std::vector<double> v(m);
        for (auto& x : v) x = rs.normal();
        std::vector<double> expect(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) expect[i] += H[i * m + j] * v[j];
        }
        fwht(v);
        for (std::size_t i = 0; i < m; ++i) {
            if (std::fabs(v[i] - expect[i]) > 1e-12) {
                return {false, fmt("matrix mismatch at m=%zu", m)};
            }
        }
    }

    for (std::size_t m : {std::size_t{1} << 10, std::size_t{1} << 16, std::size_t{1} << 20}) {
        std::vector<double> v(m);
        double norm_sq = 0.0;
        for (auto& x : v) {
            x = rs.normal();
            norm_sq += x * x;
        }
        const auto orig = v;
        fwht(v);
        double norm_after = 0.0;
        for (double x : v) norm_after += x * x;
        if (std::fabs(std::sqrt(norm_after) - std::sqrt(norm_sq)) >
            1e-12 * std::sqrt(norm_sq)) {
            return {false, fmt("isometry violated at m=%zu", m)};
        }
        fwht(v);
        for (std::size_t i = 0; i < m; ++i) {
            if (std::fabs(v[i] - orig[i]) > 1e-10 * (std::fabs(orig[i]) + 1e-30)) {
                return {false, fmt("involution violated at m=%zu", m)};
            }
        }
    }

    std::vector<double> big(std::size_t{1} << 20);
    for (auto& x : big) x = rs.normal();
    const auto t0 = Clock::now();
    fwht(big);
    const double secs = seconds_since(t0);
    if (secs >= 1.0) return {false, fmt("m=2^20 transform took %.3f s", secs)};
    return {true, fmt("m=2^20 transform in %.1f ms", 1e3 * secs)};
}

// ---------------------------------------------------------------------------
// 2. Embedding certification at d=512, eps=0.1, eta=0.01, Lambda=4.
Outcome criterion2() {
    CertifyConfig config;
    config.d = 512;
    config.epsilon = 0.1;
    config.eta = 0.01;
    config.lambda = 4.0;
    config.trials = 2000;
    config.seed = 2024;

    const auto t0 = Clock::now();
    const CertifyReport report = certify_embedding(config);
    const double secs = seconds_since(t0);

    std::string detail = fmt("m=%zu,", report.m);
    bool pass = true;
    for (const char* name : {"expansion", "contraction", "collapse"}) {
        const SuiteResult* suite = report.suite(name);
        if (suite == nullptr) return {false, "missing suite"};
        detail += fmt(" %s=%.2f%%", name, 100.0 * suite->rate);
        pass = pass && suite->rate <= 0.02;
    }
    detail += fmt(" (%.0f s)", secs);
    if (secs >= 120.0) return {false, detail + " over the 2 min budget"};
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 3. Exact distance identity on 100 random pairs.
Outcome criterion3() {
    const auto params = EmbeddingParams::for_kde(64, 0.1, 0.01, 4.0, 33);
    ComposedMap map(params);
    FeatureScratch scratch;
    RandomStream rs(34, "pairs");

    std::vector<double> fx(2 * params.m), fy(2 * params.m), vz(params.m);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(64), y(64), z(64);
        for (std::size_t i = 0; i < 64; ++i) {
            x[i] = 0.3 * rs.normal();
            y[i] = 0.3 * rs.normal();
            z[i] = x[i] - y[i];
        }
        map.phi(x, fx, scratch);
        map.phi(y, fy, scratch);
        double lhs = 0.0;
        for (std::size_t i = 0; i < fx.size(); ++i) {
            lhs += (fx[i] - fy[i]) * (fx[i] - fy[i]);
        }
        map.inner_transform(z, vz);
        double rhs = 0.0;
        for (double v : vz) rhs += 1.0 - std::cos(v);  // independent libm route
        rhs *= 2.0 / static_cast<double>(params.m);
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    return {worst <= 1e-9, fmt("max |lhs-rhs| = %.2e (m=%zu)", worst, params.m)};
}

// ---------------------------------------------------------------------------
// 4. E[(1/m) sum cos((Vz)_j)] = exp(-||z||^2/2) within 0.01 at 10^4 draws.
Outcome criterion4() {
    const std::size_t m = 1024, draws = 10000;
    std::string detail;
    for (double z_norm : {0.5, 1.0, 2.0}) {
        const auto B = sample_sign_diagonal({501, "B1"}, m);
        std::vector<double> z(m, 0.0);
        z[0] = z_norm;

        std::vector<double> partial(draws);
        parallel_for(draws, [&](std::size_t t) {
            thread_local std::vector<double> tbuf, tcos;
            if (tbuf.size() < m) {
                tbuf.resize(m);
                tcos.resize(m);
            }
            const auto G = sample_gaussian_diagonal({derive_seed(502, t), "G1"}, m);
            std::copy(z.begin(), z.end(), tbuf.begin());
            apply_fastfood(B, G, std::span<double>(tbuf.data(), m));
            cos_batch(std::span<const double>(tbuf.data(), m),
                      std::span<double>(tcos.data(), m));
            double mean_cos = 0.0;
            for (double c : tcos) mean_cos += c;
            partial[t] = mean_cos / static_cast<double>(m);
        });
        double acc = 0.0;
        for (double p : partial) acc += p;
        const double mean = acc / static_cast<double>(draws);
        const double expect = std::exp(-z_norm * z_norm / 2.0);
        detail += fmt(" |z|=%.1f: %.4f vs %.4f;", z_norm, mean, expect);
        if (std::fabs(mean - expect) > 0.01) return {false, detail};
    }
    return {true, detail};
}

// ---------------------------------------------------------------------------
// 5. End-to-end Gaussian KDE: n=5000, d=1024, Dsig=8, eps=0.1, default
//    constants, 200 queries x 20 seeds; |err| <= 3 eps for >= 90%, median <= eps.
Outcome criterion5() {
    const auto t0 = Clock::now();
    const double eps = 0.1;
    MixtureConfig mc;
    mc.n = 5000;
    mc.d = 1024;
    mc.delta_bound = 8.0;
    mc.sigma = 1.0;
    mc.components = 6;
    mc.seed = 777;
    const Dataset data = make_gaussian_mixture(mc);

    const std::size_t n_queries = 200;
    const auto queries = sample_queries(mc, n_queries);
    std::vector<double> exact(n_queries);
    for (std::size_t i = 0; i < n_queries; ++i) {
        exact[i] = exact_kde(data, {queries.data() + i * mc.d, mc.d}, Kernel::gaussian());
    }

    std::vector<double> errors;
    errors.reserve(n_queries * 20);
    std::size_t m_used = 0;
    for (std::size_t s = 0; s < 20; ++s) {
        SketchConfig config;
        config.method = Method::OURS;
        config.epsilon = eps;
        config.delta = 0.1;
        config.seed = derive_seed(888, s);
        const KdeSketch sketch = build_sketch(data, config);
        m_used = sketch.embedding.m;
        for (std::size_t i = 0; i < n_queries; ++i) {
            errors.push_back(
                std::fabs(query(sketch, {queries.data() + i * mc.d, mc.d}) - exact[i]));
        }
    }

    std::size_t within = 0;
    for (double e : errors) within += e <= 3.0 * eps;
    const double frac = static_cast<double>(within) / static_cast<double>(errors.size());
    const double med = median(errors);
    const double secs = seconds_since(t0);
    const bool pass = frac >= 0.90 && med <= eps && secs < 300.0;
    return {pass, fmt("m=%zu, within-3eps=%.1f%%, median=%.4f (%.0f s)", m_used, 100.0 * frac,
                      med, secs)};
}

// ---------------------------------------------------------------------------
// 6. Relative timing at d=2^16, eps=0.25, Dsig=16 plus near-linear growth in d.
Outcome criterion6() {
    const double eps = 0.25, delta = 0.1;
    const std::size_t d = std::size_t{1} << 16;

    MixtureConfig mc;
    mc.n = 64;
    mc.d = d;
    mc.delta_bound = 16.0;
    mc.sigma = 1.0;
    mc.seed = 999;
    const Dataset data = make_gaussian_mixture(mc);
    const std::size_t n_queries = 64;
    const auto queries = sample_queries(mc, n_queries);

    // Benchmark profile: leading-term dimensions (the polylog factor in m is
    // what the asymptotic comparison hides), subsampled final stage.
    EmbeddingConstants bench_consts;
    bench_consts.c_m = 0.5;
    bench_consts.log_exponent = 0;
    bench_consts.outer_subsample = true;

    SketchConfig ours_config;
    ours_config.method = Method::OURS;
    ours_config.epsilon = eps;
    ours_config.delta = delta;
    ours_config.seed = 1001;
    ours_config.consts = bench_consts;
    const KdeSketch ours = build_sketch(data, ours_config);

    SketchConfig rff_config;
    rff_config.method = Method::RFF;
    rff_config.epsilon = eps;
    rff_config.delta = delta;
    rff_config.seed = 1002;
    // n_features = ceil(1/eps^2) * ceil(ln(1/delta))
    rff_config.rff_features = static_cast<std::size_t>(std::ceil(1.0 / (eps * eps))) *
                              static_cast<std::size_t>(std::ceil(std::log(1.0 / delta)));
    const KdeSketch rff = build_sketch(data, rff_config);

    auto time_queries = [&](const KdeSketch& sketch, std::size_t count) {
        for (std::size_t i = 0; i < 10; ++i) {
            (void)query(sketch, {queries.data() + (i % n_queries) * d, d});
        }
        const auto t0 = Clock::now();
        double sink = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            sink += query(sketch, {queries.data() + (i % n_queries) * d, d});
        }
        const double mean_us = 1e6 * seconds_since(t0) / static_cast<double>(count);
        return std::isfinite(sink) ? mean_us : -1.0;
    };

    const double ours_us = time_queries(ours, 1000);
    const double rff_us = time_queries(rff, 1000);

    // accuracy sanity at the bench profile
    double err_p95;
    {
        std::vector<double> errs(n_queries);
        for (std::size_t i = 0; i < n_queries; ++i) {
            const std::span<const double> y{queries.data() + i * d, d};
            errs[i] = std::fabs(query(ours, y) - exact_kde(data, y, Kernel::gaussian()));
        }
        std::sort(errs.begin(), errs.end());
        err_p95 = errs[static_cast<std::size_t>(0.95 * n_queries)];
    }

    // doubling d at fixed eps, Dsig
    MixtureConfig mc2 = mc;
    mc2.d = 2 * d;
    const Dataset data2 = make_gaussian_mixture(mc2);
    const auto queries2 = sample_queries(mc2, 16);
    const KdeSketch ours2 = build_sketch(data2, ours_config);
    auto time2 = [&](std::size_t count) {
        for (std::size_t i = 0; i < 10; ++i) {
            (void)query(ours2, {queries2.data(), 2 * d});
        }
        const auto t0 = Clock::now();
        double sink = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            sink += query(ours2, {queries2.data() + (i % 16) * 2 * d, 2 * d});
        }
        (void)sink;
        return 1e6 * seconds_since(t0) / static_cast<double>(count);
    };
    const double ours2_us = time2(300);
    const double growth = ours2_us / ours_us;
    const bool m_linear = ours2.embedding.m == 2 * ours.embedding.m;

    const bool pass = ours_us < rff_us && growth <= 2.6 && m_linear && err_p95 <= 3.0 * eps;
    return {pass, fmt("ours=%.0fus rff=%.0fus (nf=%zu), 2d growth=%.2fx, m=%zu->%zu, "
                      "err_p95=%.3f",
                      ours_us, rff_us, rff.rff_features, growth, ours.embedding.m,
                      ours2.embedding.m, err_p95)};
}

// ---------------------------------------------------------------------------
// 7. Exp-sum approximation over the full parameter grid.
Outcome criterion7() {
    for (double beta : {0.5, 1.0, 2.0, 8.0}) {
        for (double zeta : {1e-4, 1e-2, 0.5}) {
            for (double eps : {1e-2, 1e-3}) {
                ExpSumApprox approx;
                try {
                    approx = build_exp_sum(beta, zeta, eps);
                } catch (const std::exception& e) {
                    return {false, fmt("build failed at beta=%g zeta=%g eps=%g: %s", beta,
                                       zeta, eps, e.what())};
                }
                const double err = approx.max_rel_error(1000);
                if (err > eps) {
                    return {false, fmt("grid error %.3g > %.3g at beta=%g zeta=%g", err, eps,
                                       beta, zeta)};
                }
                if (approx.alpha_sum() > 1.0 + eps) {
                    return {false, fmt("sum alpha %.6f > 1+eps at beta=%g zeta=%g",
                                       approx.alpha_sum(), beta, zeta)};
                }
            }
        }
    }
    return {true, "24 (beta, zeta, eps) combinations within tolerance"};
}

// ---------------------------------------------------------------------------
// 8. IMQ end-to-end: n=2000, d=256, beta=1, eps=0.05.
Outcome criterion8() {
    const auto t0 = Clock::now();
    const double eps = 0.05, beta = 1.0;
    MixtureConfig mc;
    mc.n = 2000;
    mc.d = 256;
    mc.delta_bound = 2.0;
    mc.sigma = 1.0;
    mc.seed = 1234;
    const Dataset data = make_gaussian_mixture(mc);

    EmbeddingConstants consts;
    consts.log_exponent = 0;  // benchmark profile; see decisions ledger

    const std::size_t n_queries = 25, n_seeds = 4;
    const auto queries = sample_queries(mc, n_queries);
    std::vector<double> exact(n_queries);
    for (std::size_t i = 0; i < n_queries; ++i) {
        exact[i] = exact_kde(data, {queries.data() + i * mc.d, mc.d}, Kernel::imq(beta));
    }

    std::size_t within = 0, banks = 0;
    for (std::size_t s = 0; s < n_seeds; ++s) {
        const ImqSketch sketch =
            imq_build(data, beta, eps, 0.1, derive_seed(4321, s), Method::OURS, consts);
        banks = sketch.bank.size();
        for (std::size_t i = 0; i < n_queries; ++i) {
            const double est = imq_query(sketch, {queries.data() + i * mc.d, mc.d});
            within += std::fabs(est - exact[i]) <= 4.0 * eps;
        }
    }
    const double frac =
        static_cast<double>(within) / static_cast<double>(n_queries * n_seeds);
    return {frac >= 0.90, fmt("within-4eps=%.1f%% over %zu pairs (%zu banks, %.0f s)",
                              100.0 * frac, n_queries * n_seeds, banks, seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// 9. DP sensitivity: neighboring pairs, including saturating rows.
Outcome criterion9() {
    const double eps = 0.25, delta = 0.1, eps_dp = 1.0;
    EmbeddingConstants consts;
    consts.log_exponent = 0;

    // (a) pipeline-level neighboring datasets
    MixtureConfig mc;
    mc.n = 40;
    mc.d = 8;
    mc.delta_bound = 2.0;
    mc.seed = 4000;
    const Dataset data = make_gaussian_mixture(mc);
    const auto base = dp_prenoise_mean(data, eps, delta, eps_dp, 41, consts);
    const DpSketch ref = dp_build(data, eps, delta, eps_dp, 41, consts);
    const double bound = 2.0 * static_cast<double>(ref.params.ell) * ref.params.clip_level /
                         static_cast<double>(data.n);

    RandomStream rs(4001, "swap");
    for (std::size_t trial = 0; trial < 40; ++trial) {
        Dataset neighbor = data;
        const std::size_t idx = rs.below(data.n);
        for (std::size_t k = 0; k < data.d; ++k) {
            neighbor.points[idx * data.d + k] = 0.9 * (rs.uniform01() - 0.5);
        }
        const auto other = dp_prenoise_mean(neighbor, eps, delta, eps_dp, 41, consts);
        double l1 = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) l1 += std::fabs(base[i] - other[i]);
        if (l1 > bound * (1.0 + 1e-12)) {
            return {false, fmt("pipeline pair %zu: l1=%.6g > bound=%.6g", trial, l1, bound)};
        }
    }

    // (b) clip-stage pairs where the replacement saturates every coordinate
    const std::size_t ell = 128, n = 50;
    const double L = 0.4;
    for (std::size_t trial = 0; trial < 10; ++trial) {
        RandomStream gen(derive_seed(4002, trial), "rows");
        std::vector<std::vector<double>> rows(n, std::vector<double>(ell));
        for (auto& row : rows) {
            for (auto& v : row) v = 4.0 * L * (gen.uniform01() - 0.5);
        }
        auto clipped_mean = [&](const std::vector<std::vector<double>>& rr) {
            PairwiseVectorSum acc(ell);
            for (const auto& row : rr) {
                auto c = row;
                clip_inplace(c, L);
                acc.push(c);
            }
            auto mean = acc.total();
            for (double& v : mean) v /= static_cast<double>(n);
            return mean;
        };
        auto rows2 = rows;
        for (auto& v : rows2[gen.below(n)]) v = (trial % 2 == 0) ? 1e12 : -1e12;
        const auto ma = clipped_mean(rows);
        const auto mb = clipped_mean(rows2);
        double l1 = 0.0;
        for (std::size_t i = 0; i < ell; ++i) l1 += std::fabs(ma[i] - mb[i]);
        const double stage_bound = 2.0 * static_cast<double>(ell) * L / static_cast<double>(n);
        if (l1 > stage_bound * (1.0 + 1e-12)) {
            return {false, fmt("saturating pair %zu: l1=%.6g > bound=%.6g", trial, l1,
                               stage_bound)};
        }
    }
    return {true, fmt("50 neighboring pairs within 2*ell*L/n (pipeline bound %.4g)", bound)};
}

// ---------------------------------------------------------------------------
// 10. DP accuracy at n=1e5, eps=0.1, eps_dp=1; vanishing-noise consistency.
Outcome criterion10() {
    const auto t0 = Clock::now();
    const double eps = 0.1, delta = 0.1;
    MixtureConfig mc;
    mc.n = 100000;
    mc.d = 16;
    mc.delta_bound = 2.0;
    mc.sigma = 1.0;
    mc.seed = 5150;
    const Dataset data = make_gaussian_mixture(mc);

    EmbeddingConstants consts;
    consts.log_exponent = 0;

    const DpSketch priv = dp_build(data, eps, delta, 1.0, 61, consts);
    const std::size_t n_queries = 200;
    const auto queries = sample_queries(mc, n_queries);

    std::size_t within = 0;
    for (std::size_t i = 0; i < n_queries; ++i) {
        const std::span<const double> y{queries.data() + i * mc.d, mc.d};
        const double est = dp_query(priv, y);
        const double exact = exact_kde(data, y, Kernel::gaussian());
        within += std::fabs(est - exact) <= 0.5;
    }
    const double frac = static_cast<double>(within) / static_cast<double>(n_queries);

    // eps_dp = 1e6: the noise is negligible next to the raw FJLT pipeline.
    const DpSketch nearly_exact = dp_build(data, eps, delta, 1e6, 61, consts);
    DpSketch noise_free = nearly_exact;
    noise_free.noisy_mean = dp_prenoise_mean(data, eps, delta, 1e6, 61, consts);
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        const std::span<const double> y{queries.data() + i * mc.d, mc.d};
        worst = std::max(worst,
                         std::fabs(dp_query(nearly_exact, y) - dp_query(noise_free, y)));
    }

    const bool pass = frac >= 0.90 && worst <= 1e-3;
    return {pass, fmt("within-0.5=%.1f%%, vanishing-noise dev=%.2e, ell=%zu (%.0f s)",
                      100.0 * frac, worst, priv.params.ell, seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// 11. Coreset: n=1e4, eps=0.1, delta=0.1, 50 seeds x 100 queries.
Outcome criterion11() {
    const double eps = 0.1, delta = 0.1;
    MixtureConfig mc;
    mc.n = 10000;
    mc.d = 16;
    mc.delta_bound = 4.0;
    mc.sigma = 1.0;
    mc.seed = 6001;
    const Dataset data = make_gaussian_mixture(mc);

    const std::size_t n_queries = 100;
    const auto queries = sample_queries(mc, n_queries);
    std::vector<double> exact_full(n_queries);
    for (std::size_t i = 0; i < n_queries; ++i) {
        exact_full[i] =
            exact_kde(data, {queries.data() + i * mc.d, mc.d}, Kernel::gaussian());
    }

    std::size_t failures = 0;
    const std::size_t expected_size = coreset_size(eps, delta);
    for (std::size_t s = 0; s < 50; ++s) {
        const Dataset core = coreset_subsample(data, eps, delta, derive_seed(6002, s));
        if (core.n != expected_size) return {false, fmt("coreset size %zu", core.n)};
        for (std::size_t i = 0; i < n_queries; ++i) {
            const double est =
                exact_kde(core, {queries.data() + i * mc.d, mc.d}, Kernel::gaussian());
            failures += std::fabs(est - exact_full[i]) > eps;
        }
    }
    const double rate = static_cast<double>(failures) / (50.0 * n_queries);
    return {rate <= 0.15, fmt("per-query failure rate %.2f%% (size %zu)", 100.0 * rate,
                              expected_size)};
}

// ---------------------------------------------------------------------------
// 12. Determinism across runs and thread counts.
Outcome criterion12() {
    MixtureConfig mc;
    mc.n = 400;
    mc.d = 12;
    mc.delta_bound = 4.0;
    mc.seed = 7001;
    const Dataset data = make_gaussian_mixture(mc);
    EmbeddingConstants consts;
    consts.log_exponent = 0;

    for (Method method : {Method::OURS, Method::RFF, Method::FJLT_RFF, Method::FASTFOOD}) {
        SketchConfig config;
        config.method = method;
        config.epsilon = 0.2;
        config.delta = 0.1;
        config.seed = 7100;
        config.consts = consts;
        set_default_threads(1);
        const KdeSketch a = build_sketch(data, config);
        set_default_threads(2);
        const KdeSketch b = build_sketch(data, config);
        set_default_threads(3);
        const KdeSketch c = build_sketch(data, config);
        set_default_threads(0);
        if (a.mean_features != b.mean_features || a.mean_features != c.mean_features) {
            return {false, fmt("%s sketch differs across thread counts", method_name(method))};
        }
        const std::vector<double> y(data.d, 0.05);
        if (query(a, y) != query(b, y)) {
            return {false, fmt("%s query differs", method_name(method))};
        }
    }

    set_default_threads(1);
    const DpSketch dp_a = dp_build(data, 0.2, 0.1, 1.0, 7200, consts);
    set_default_threads(2);
    const DpSketch dp_b = dp_build(data, 0.2, 0.1, 1.0, 7200, consts);
    set_default_threads(0);
    if (dp_a.noisy_mean != dp_b.noisy_mean) {
        return {false, "dp release differs across thread counts"};
    }

    set_default_threads(1);
    const ImqSketch imq_a = imq_build(data, 1.0, 0.2, 0.1, 7300, Method::OURS, consts);
    set_default_threads(2);
    const ImqSketch imq_b = imq_build(data, 1.0, 0.2, 0.1, 7300, Method::OURS, consts);
    set_default_threads(0);
    for (std::size_t i = 0; i < imq_a.bank.size(); ++i) {
        if (imq_a.bank[i].mean_features != imq_b.bank[i].mean_features) {
            return {false, "imq bank differs across thread counts"};
        }
    }
    return {true, "bit-identical builds/queries for 1, 2, 3 threads (all methods + dp + imq)"};
}

}  // namespace

int main(int argc, char** argv) {
    struct Entry {
        int number;
        const char* title;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "fwht correctness and runtime", criterion1},
        {2, "embedding certification", criterion2},
        {3, "distance identity", criterion3},
        {4, "cosine-mean expectation", criterion4},
        {5, "end-to-end gaussian kde", criterion5},
        {6, "relative timing vs rff", criterion6},
        {7, "imq exp-sum grid", criterion7},
        {8, "imq end-to-end", criterion8},
        {9, "dp sensitivity", criterion9},
        {10, "dp accuracy", criterion10},
        {11, "coreset", criterion11},
        {12, "determinism", criterion12},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Entry& e : entries) {
        if (!selected.empty() && !selected.count(e.number)) continue;
        const auto t0 = Clock::now();
        Outcome outcome;
        try {
            outcome = e.fn();
        } catch (const std::exception& ex) {
            outcome = {false, fmt("exception: %s", ex.what())};
        }
        std::printf("%s  [%2d] %-28s %s  (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", e.number,
                    e.title, outcome.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        failures += outcome.pass ? 0 : 1;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
