#include "kdesketch/dp.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "kdesketch/hadamard.hpp"
#include "kdesketch/reduction.hpp"
#include "kdesketch/rng.hpp"

namespace kdesketch {

DpParams DpParams::derive(double eps_dp, double epsilon, double delta_prime,
                          std::size_t feature_dim, std::size_t n, double c_dp) {
    if (!(eps_dp > 0.0)) throw std::invalid_argument("dp: eps_dp must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("dp: epsilon must be > 0");
    if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
        throw std::invalid_argument("dp: delta_prime must be in (0,1)");
    }
    if (!is_pow2(feature_dim)) throw std::invalid_argument("dp: feature_dim must be a power of two");

    DpParams p;
    p.eps_dp = eps_dp;
    p.delta_prime = delta_prime;
    p.feature_dim = feature_dim;
    const double F = static_cast<double>(feature_dim);
    const double raw =
        std::ceil(c_dp * std::log(F / delta_prime) * std::log(1.0 / delta_prime) /
                  (epsilon * epsilon));
    p.ell = std::min<std::size_t>(feature_dim,
                                  next_pow2(static_cast<std::size_t>(std::max(1.0, raw))));
    p.clip_level = std::sqrt(2.0 * std::log(4.0 * F / delta_prime) /
                             static_cast<double>(p.ell));
    p.laplace_scale = 2.0 * static_cast<double>(p.ell) * p.clip_level /
                      (eps_dp * static_cast<double>(n));
    return p;
}

DpPipeline::DpPipeline(const EmbeddingParams& feature_params, const DpParams& dp_params,
                       double sigma, std::uint64_t seed)
    : map_(feature_params, 1.0 / sigma),
      dp_(dp_params),
      fjlt_sign_(sample_sign_diagonal({seed, "FJLT-D"}, dp_params.feature_dim)),
      fjlt_sub_(sample_subsampler({seed, "FJLT-S"}, dp_params.ell, dp_params.feature_dim)) {
    if (map_.output_dim() != dp_.feature_dim) {
        throw std::invalid_argument("dp: feature_dim does not match the composed map output");
    }
}

void DpPipeline::project(std::span<const double> x, std::span<double> out,
                         FeatureScratch& scratch, bool clip) const {
    if (out.size() != dp_.ell) throw std::invalid_argument("dp: output size mismatch");
    if (scratch.c.size() < dp_.feature_dim) scratch.c.resize(dp_.feature_dim);
    std::span<double> features(scratch.c.data(), dp_.feature_dim);
    map_.compose(x, features, scratch);
    apply_fjlt(fjlt_sign_, fjlt_sub_, features, out);
    if (clip) clip_inplace(out, dp_.clip_level);
}

void clip_inplace(std::span<double> v, double level) {
    for (double& x : v) {
        if (x > level) x = level;
        if (x < -level) x = -level;
    }
}

namespace {

struct BuildParts {
    DpSketch sketch;
    std::vector<double> prenoise_mean;
};

BuildParts dp_build_parts(const Dataset& data, double epsilon, double delta, double eps_dp,
                          std::uint64_t seed, const EmbeddingConstants& consts,
                          const DpOptions& options) {
    if (data.n == 0) throw std::invalid_argument("dp_build: empty dataset");
    if (!(eps_dp > 0.0)) throw std::invalid_argument("dp_build: eps_dp must be > 0");
    if (!(data.sigma > 0.0)) throw std::invalid_argument("dp_build: sigma must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("dp_build: delta in (0,1)");

    const double n_required =
        std::ceil(options.c_cond * std::log(1.0 / delta) / (epsilon * epsilon * eps_dp));
    if (static_cast<double>(data.n) < n_required) {
        std::fprintf(stderr,
                     "kdesketch: warning: |X| = %zu below the accuracy condition (~%.0f); the "
                     "release stays %g-DP but the estimate may be noisy\n",
                     data.n, n_required, eps_dp);
    }

    const double delta_prime = delta / static_cast<double>(data.n);

    DpSketch sketch;
    sketch.seed = seed;
    sketch.n_points = data.n;
    sketch.d = data.d;
    sketch.sigma = data.sigma;
    sketch.delta_bound = data.delta_bound;
    sketch.epsilon = epsilon;
    sketch.delta = delta;
    sketch.feature_params = EmbeddingParams::for_kde(data.d, epsilon, delta_prime,
                                                     data.effective_diameter(), seed, consts);
    sketch.params = DpParams::derive(eps_dp, epsilon, delta_prime,
                                     sketch.feature_params.output_dim(), data.n, options.c_dp);

    DpPipeline pipeline(sketch.feature_params, sketch.params, data.sigma, seed);
    const unsigned threads = default_threads();
    std::vector<FeatureScratch> scratches(std::max<std::size_t>(std::size_t{4} * threads, 8));
    BuildParts parts;
    parts.prenoise_mean = deterministic_mean(
        data.n, sketch.params.ell,
        [&](std::size_t i, std::size_t slot, std::span<double> out) {
            pipeline.project(data.point(i), out, scratches[slot], /*clip=*/true);
        });

    // Single-threaded noise pass in fixed coordinate order.
    RandomStream noise(seed, "laplace");
    sketch.noisy_mean = parts.prenoise_mean;
    for (double& x : sketch.noisy_mean) x += noise.laplace(sketch.params.laplace_scale);
    parts.sketch = std::move(sketch);
    return parts;
}

}  // namespace

DpSketch dp_build(const Dataset& data, double epsilon, double delta, double eps_dp,
                  std::uint64_t seed, const EmbeddingConstants& consts,
                  const DpOptions& options) {
    return dp_build_parts(data, epsilon, delta, eps_dp, seed, consts, options).sketch;
}

std::vector<double> dp_prenoise_mean(const Dataset& data, double epsilon, double delta,
                                     double eps_dp, std::uint64_t seed,
                                     const EmbeddingConstants& consts,
                                     const DpOptions& options) {
    return dp_build_parts(data, epsilon, delta, eps_dp, seed, consts, options).prenoise_mean;
}

double dp_query(const DpSketch& sketch, std::span<const double> y) {
    if (y.size() != sketch.d) throw std::invalid_argument("dp_query: dimension mismatch");
    DpPipeline pipeline(sketch.feature_params, sketch.params, sketch.sigma, sketch.seed);
    FeatureScratch scratch;
    std::vector<double> ay(sketch.params.ell);
    pipeline.project(y, ay, scratch, /*clip=*/false);
    double acc = 0.0;
    for (std::size_t i = 0; i < ay.size(); ++i) acc += sketch.noisy_mean[i] * ay[i];
    return acc;
}

double laplace_sample(const RngSeed& seed, double b) {
    RandomStream rs(seed);
    return rs.laplace(b);
}

}  // namespace kdesketch
