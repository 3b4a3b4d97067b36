#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "kdesketch/transforms.hpp"

namespace kdesketch {

struct EmbeddingConstants {
    double c_log = 4.0;   // c in s = sqrt(eps / (c ln(1/eps))), c >= 1
    double c_m = 1.0;     // multiplier in the working-dimension formula
    int log_exponent = 1; // exponent on the ceil(log2(...)) factor
    bool full_fastfood = false;   // use sqrt(m)*Sigma H G Pi H B instead of sqrt(m)*H G H B
    bool outer_subsample = false; // subsample the outer pre-psi vector to ell_out
};

// Seeded description of the two-stage embedding. The working dimension is
//   m = next_pow2(c_m * (d + ceil(eps*Dsig^2) + ceil(eps^-3))
//                     * ceil(log2(d*Dsig/(eps*eta) + 2))^log_exponent),
// clamped to at least next_pow2(d). eps is clamped into (0, 1/2].
struct EmbeddingParams {
    std::size_t d = 0;
    std::size_t m = 0;
    double epsilon = 0.0;
    double eta = 0.0;
    double lambda = 0.0;      // embedding diameter bound
    double delta_sigma = 0.0; // effective data diameter the params were derived for
    double s = 0.0;           // input scale of the spherical stage
    std::uint64_t seed = 0;   // streams B1,G1,B2,G2,S2 derive from this value
    std::size_t ell_out = 0;  // 0 => full 4m output
    EmbeddingConstants consts;

    // Parameterized by the embedding diameter Lambda (certification use).
    static EmbeddingParams for_embedding(std::size_t d, double epsilon, double eta,
                                         double Lambda, std::uint64_t seed,
                                         const EmbeddingConstants& consts = {});
    // Parameterized by the effective data diameter (KDE use).
    static EmbeddingParams for_kde(std::size_t d, double epsilon, double eta,
                                   double delta_sigma, std::uint64_t seed,
                                   const EmbeddingConstants& consts = {});

    std::size_t output_dim() const { return ell_out > 0 ? 2 * ell_out : 4 * m; }
};

// Reusable scratch buffers; one per thread.
struct FeatureScratch {
    std::vector<double> a, b, c;
};

// The two-stage map
//   K(x) = psi_2m( V2 * (sqrt(2)/s) * psi_m( V1 * s * pad(x) ) ),
// with V_i = sqrt(dim) * H G_i H B_i. The sqrt(2) makes feature inner
// products estimate exp(-||x-y||^2) rather than exp(-||x-y||^2 / 2).
// When ell_out > 0 the outer pre-psi vector is coordinate-subsampled first.
class ComposedMap {
public:
    // input_prescale is folded into the first stage's input scaling; KDE
    // callers pass 1/sigma there.
    explicit ComposedMap(const EmbeddingParams& params, double input_prescale = 1.0);

    const EmbeddingParams& params() const { return params_; }
    std::size_t output_dim() const { return params_.output_dim(); }

    // Phi(x): unit vector in R^{2m}. x.size() <= m.
    void phi(std::span<const double> x, std::span<double> out, FeatureScratch& scratch) const;
    // Psi(x) = Phi(s x)/s, on the sphere of radius 1/s.
    void spherical(std::span<const double> x, std::span<double> out, FeatureScratch& scratch) const;
    // K(x). out.size() must be output_dim().
    void compose(std::span<const double> x, std::span<double> out, FeatureScratch& scratch) const;

    // V1 * pad(z), the transform both diagnostics and distance identities use.
    void inner_transform(std::span<const double> z, std::span<double> out_m) const;

private:
    EmbeddingParams params_;
    double input_prescale_;
    FastfoodOperator inner_, outer_;
    Subsampler outer_sub_;  // used when ell_out > 0
};

// Dense random Fourier features psi(W x / sigma); W has i.i.d. N(0, 2)
// entries so that inner products estimate exp(-||x-y||^2 / sigma^2).
class RffMap {
public:
    RffMap(const RngSeed& seed, std::size_t n_features, std::size_t d, double sigma);
    std::size_t output_dim() const { return 2 * n_features_; }
    void features(std::span<const double> x, std::span<double> out, FeatureScratch& scratch) const;

private:
    std::size_t n_features_, d_;
    double inv_sigma_;
    std::vector<double> w_;  // row-major n_features x d
};

// FJLT from d to d_eps dimensions, then dense RFF on the reduced vector.
class FjltRffMap {
public:
    FjltRffMap(std::uint64_t seed, std::size_t d_eps, std::size_t n_features,
               std::size_t d, double sigma);
    std::size_t output_dim() const { return rff_.output_dim(); }
    void features(std::span<const double> x, std::span<double> out, FeatureScratch& scratch) const;

private:
    std::size_t d_, padded_;
    SignDiagonal fjlt_sign_;
    Subsampler fjlt_sub_;
    RffMap rff_;
};

// Single Fastfood stage with row subsampling: psi_ell(S V (sqrt(2) x / sigma)).
class FastfoodMap {
public:
    FastfoodMap(std::uint64_t seed, std::size_t d, std::size_t ell, double sigma,
                bool full_variant = false);
    std::size_t output_dim() const { return 2 * sub_.size(); }
    std::size_t padded_dim() const { return op_.dim(); }
    void features(std::span<const double> x, std::span<double> out, FeatureScratch& scratch) const;

private:
    std::size_t d_;
    double inv_sigma_;
    FastfoodOperator op_;
    Subsampler sub_;
};

// Spec-shaped convenience wrappers (operators are resampled per call).
std::vector<double> phi_embed(const EmbeddingParams& params, std::span<const double> x);
std::vector<double> spherical_embed(const EmbeddingParams& params, std::span<const double> x);
std::vector<double> compose_K(const EmbeddingParams& params, std::span<const double> x);
std::vector<double> rff_features(const RngSeed& seed, std::size_t n_features, double sigma,
                                 std::span<const double> x);
std::vector<double> fjlt_rff_features(std::uint64_t seed, std::size_t d_eps,
                                      std::span<const double> x);

struct EmbeddingDiagnostics {
    double Q = 0.0;        // ||V z||^2 / m
    double W = 0.0;        // mean fourth power of (V z)_j
    double dist_sq = 0.0;  // ||Phi(x) - Phi(y)||^2
};
EmbeddingDiagnostics embedding_diagnostics(const EmbeddingParams& params,
                                           std::span<const double> x,
                                           std::span<const double> y);

// Feature count heuristic for the RFF/FJLT+RFF baselines at per-pair failure
// budget eta: ceil(eps^-2) * ceil(ln(1/eta)).
std::size_t rff_feature_count(double epsilon, double eta);

}  // namespace kdesketch
