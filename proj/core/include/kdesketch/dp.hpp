#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kdesketch/kde.hpp"

namespace kdesketch {

struct DpOptions {
    double c_dp = 1.0;    // multiplier on the projected dimension ell
    double c_cond = 1.0;  // multiplier in the |X| >= c ln(1/delta)/(eps^2 eps_dp) condition
};

// Derived privacy parameters of one release.
struct DpParams {
    double eps_dp = 0.0;
    std::size_t ell = 0;          // projected dimension
    double clip_level = 0.0;      // L = sqrt(2 ln(4 F / delta') / ell)
    double laplace_scale = 0.0;   // b = 2 ell L / (eps_dp n)
    double delta_prime = 0.0;     // delta / n
    std::size_t feature_dim = 0;  // F, the (power-of-two) source dimension of A

    static DpParams derive(double eps_dp, double epsilon, double delta_prime,
                           std::size_t feature_dim, std::size_t n, double c_dp = 1.0);
};

// Released object: the noised, clipped, projected mean plus the seeds that
// re-derive K and A. Contains no per-point data.
struct DpSketch {
    std::vector<double> noisy_mean;
    DpParams params;
    EmbeddingParams feature_params;  // the composed map K
    std::uint64_t seed = 0;
    std::size_t n_points = 0;
    std::size_t d = 0;
    double sigma = 1.0;
    double delta_bound = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
};

// x -> clip(A K(x / sigma)) pipeline shared by build, query and tests.
class DpPipeline {
public:
    DpPipeline(const EmbeddingParams& feature_params, const DpParams& dp_params,
               double sigma, std::uint64_t seed);
    std::size_t ell() const { return dp_.ell; }
    // a_x = A K(x); entries clipped into [-L, L] when clip is set.
    void project(std::span<const double> x, std::span<double> out, FeatureScratch& scratch,
                 bool clip) const;

private:
    ComposedMap map_;
    DpParams dp_;
    SignDiagonal fjlt_sign_;
    Subsampler fjlt_sub_;
};

// The release mechanism: project, clip, average (deterministic tree),
// add i.i.d. Laplace(b) noise per coordinate. The output is eps_dp-DP with
// respect to single-point changes by the clipped mean's l1-sensitivity
// 2 ell L / n; privacy never depends on n, only accuracy does (the size
// condition below warns instead of failing).
DpSketch dp_build(const Dataset& data, double epsilon, double delta, double eps_dp,
                  std::uint64_t seed, const EmbeddingConstants& consts = {},
                  const DpOptions& options = {});

// The pre-noise clipped mean M_X of the same build; exposed for sensitivity
// and vanishing-noise tests.
std::vector<double> dp_prenoise_mean(const Dataset& data, double epsilon, double delta,
                                     double eps_dp, std::uint64_t seed,
                                     const EmbeddingConstants& consts = {},
                                     const DpOptions& options = {});

// Post-release query: noisy_mean^T (A K(y)); consumes no privacy budget.
double dp_query(const DpSketch& sketch, std::span<const double> y);

// Single Laplace(0, b) draw via inverse CDF.
double laplace_sample(const RngSeed& seed, double b);

// Entrywise truncation into [-L, L].
void clip_inplace(std::span<double> v, double level);

}  // namespace kdesketch
