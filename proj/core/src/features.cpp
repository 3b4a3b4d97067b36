#include "kdesketch/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "kdesketch/hadamard.hpp"
#include "kdesketch/trig.hpp"

namespace kdesketch {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void ensure(std::vector<double>& v, std::size_t n) {
    if (v.size() < n) v.resize(n);
}

void check_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument("feature map: non-finite input");
    }
}

double clamp_epsilon(double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (epsilon > 0.5) {
        std::fprintf(stderr,
                     "kdesketch: warning: epsilon=%g exceeds 1/2; using 1/2 (guarantees "
                     "assume small epsilon)\n",
                     epsilon);
        return 0.5;
    }
    return epsilon;
}

// pad(x*scale) into buf of length m.
void scaled_pad(std::span<const double> x, double scale, std::vector<double>& buf,
                std::size_t m) {
    ensure(buf, m);
    const std::size_t d = x.size();
    for (std::size_t i = 0; i < d; ++i) buf[i] = scale * x[i];
    for (std::size_t i = d; i < m; ++i) buf[i] = 0.0;
}

EmbeddingParams derive(std::size_t d, double epsilon, double eta, double delta_sigma,
                       double lambda, std::uint64_t seed,
                       const EmbeddingConstants& consts) {
    if (d == 0) throw std::invalid_argument("embedding: d must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("embedding: eta must be in (0,1)");
    if (!(consts.c_log >= 1.0)) throw std::invalid_argument("embedding: c_log must be >= 1");
    if (!(consts.c_m > 0.0)) throw std::invalid_argument("embedding: c_m must be > 0");
    if (consts.log_exponent < 0) throw std::invalid_argument("embedding: log_exponent must be >= 0");

    EmbeddingParams p;
    p.d = d;
    p.epsilon = clamp_epsilon(epsilon);
    p.eta = eta;
    p.s = std::sqrt(p.epsilon / (consts.c_log * std::log(1.0 / p.epsilon)));
    p.delta_sigma = delta_sigma;
    p.lambda = lambda;
    p.seed = seed;
    p.consts = consts;

    const double dd = static_cast<double>(d);
    const double eps = p.epsilon;
    const double inner = dd + std::ceil(eps * delta_sigma * delta_sigma) +
                         std::ceil(1.0 / (eps * eps * eps));
    const double logfac_base = std::ceil(std::log2(dd * delta_sigma / (eps * eta) + 2.0));
    double logfac = 1.0;
    for (int i = 0; i < consts.log_exponent; ++i) logfac *= logfac_base;
    const double m_raw = std::ceil(consts.c_m * inner * logfac);
    p.m = next_pow2(std::max<std::size_t>(d, static_cast<std::size_t>(m_raw)));

    if (consts.outer_subsample) {
        const double dhat = 2.0 / p.s;
        const double raw = std::ceil(consts.c_m * dhat * dhat / (eps * eps) * logfac);
        p.ell_out = std::min<std::size_t>(2 * p.m,
                                          next_pow2(static_cast<std::size_t>(std::max(1.0, raw))));
    }
    return p;
}

}  // namespace

EmbeddingParams EmbeddingParams::for_embedding(std::size_t d, double epsilon, double eta,
                                               double Lambda, std::uint64_t seed,
                                               const EmbeddingConstants& consts) {
    if (!(Lambda > 0.0)) throw std::invalid_argument("embedding: Lambda must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    // Invert Lambda = 2 s Delta_sigma to reuse the KDE-form dimension formula.
    const double eps = std::min(epsilon, 0.5);  // derive() warns on the clamp
    const double s = std::sqrt(eps / (consts.c_log * std::log(1.0 / eps)));
    return derive(d, epsilon, eta, Lambda / (2.0 * s), Lambda, seed, consts);
}

EmbeddingParams EmbeddingParams::for_kde(std::size_t d, double epsilon, double eta,
                                         double delta_sigma, std::uint64_t seed,
                                         const EmbeddingConstants& consts) {
    if (delta_sigma < 0.0) throw std::invalid_argument("embedding: delta_sigma must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    const double eps = std::min(epsilon, 0.5);
    const double s = std::sqrt(eps / (consts.c_log * std::log(1.0 / eps)));
    return derive(d, epsilon, eta, delta_sigma, 2.0 * s * delta_sigma, seed, consts);
}

ComposedMap::ComposedMap(const EmbeddingParams& params, double input_prescale)
    : params_(params),
      input_prescale_(input_prescale),
      inner_(make_fastfood(params.seed, "1", params.m, params.consts.full_fastfood)),
      outer_(make_fastfood(params.seed, "2", 2 * params.m, params.consts.full_fastfood)) {
    if (params_.d > params_.m) throw std::invalid_argument("ComposedMap: m must be >= d");
    if (params_.ell_out > 0) {
        outer_sub_ = sample_subsampler({params_.seed, "S2"}, params_.ell_out, 2 * params_.m);
    }
}

void ComposedMap::inner_transform(std::span<const double> z, std::span<double> out_m) const {
    if (z.size() > params_.m || out_m.size() != params_.m) {
        throw std::invalid_argument("inner_transform: dimension mismatch");
    }
    for (std::size_t i = 0; i < z.size(); ++i) out_m[i] = z[i];
    for (std::size_t i = z.size(); i < params_.m; ++i) out_m[i] = 0.0;
    inner_.apply(out_m);
}

void ComposedMap::phi(std::span<const double> x, std::span<double> out,
                      FeatureScratch& scratch) const {
    check_finite(x);
    if (x.size() > params_.m) throw std::invalid_argument("phi: input dimension exceeds m");
    if (out.size() != 2 * params_.m) throw std::invalid_argument("phi: output size mismatch");
    scaled_pad(x, 1.0, scratch.a, params_.m);
    ensure(scratch.b, params_.m);
    inner_.apply(std::span<double>(scratch.a.data(), params_.m),
                 std::span<double>(scratch.b.data(), params_.m));
    psi_into(std::span<const double>(scratch.a.data(), params_.m), out);
}

void ComposedMap::spherical(std::span<const double> x, std::span<double> out,
                            FeatureScratch& scratch) const {
    check_finite(x);
    if (out.size() != 2 * params_.m) throw std::invalid_argument("spherical: output size mismatch");
    scaled_pad(x, params_.s, scratch.a, params_.m);
    ensure(scratch.b, params_.m);
    inner_.apply(std::span<double>(scratch.a.data(), params_.m),
                 std::span<double>(scratch.b.data(), params_.m));
    psi_into(std::span<const double>(scratch.a.data(), params_.m), out);
    const double inv_s = 1.0 / params_.s;
    for (double& v : out) v *= inv_s;
}

void ComposedMap::compose(std::span<const double> x, std::span<double> out,
                          FeatureScratch& scratch) const {
    check_finite(x);
    if (x.size() > params_.m) throw std::invalid_argument("compose: input dimension exceeds m");
    if (out.size() != output_dim()) throw std::invalid_argument("compose: output size mismatch");
    const std::size_t m = params_.m;
    const std::size_t m2 = 2 * m;

    scaled_pad(x, params_.s * input_prescale_, scratch.a, m);
    ensure(scratch.b, m2);
    inner_.apply(std::span<double>(scratch.a.data(), m),
                 std::span<double>(scratch.b.data(), m));

    std::span<double> mid(scratch.b.data(), m2);
    psi_into(std::span<const double>(scratch.a.data(), m), mid);

    const double rescale = kSqrt2 / params_.s;
    for (double& v : mid) v *= rescale;

    ensure(scratch.a, m2);
    outer_.apply(mid, std::span<double>(scratch.a.data(), m2));

    if (params_.ell_out > 0) {
        ensure(scratch.a, params_.ell_out);
        for (std::size_t i = 0; i < params_.ell_out; ++i) {
            scratch.a[i] = mid[outer_sub_.indices[i]];
        }
        psi_into(std::span<const double>(scratch.a.data(), params_.ell_out), out);
    } else {
        psi_into(std::span<const double>(mid.data(), m2), out);
    }
}

RffMap::RffMap(const RngSeed& seed, std::size_t n_features, std::size_t d, double sigma)
    : n_features_(n_features), d_(d), inv_sigma_(1.0 / sigma) {
    if (n_features == 0) throw std::invalid_argument("rff: n_features must be >= 1");
    if (d == 0) throw std::invalid_argument("rff: d must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("rff: sigma must be > 0");
    RandomStream rs(seed);
    w_.resize(n_features * d);
    for (double& v : w_) v = kSqrt2 * rs.normal();
}

void RffMap::features(std::span<const double> x, std::span<double> out,
                      FeatureScratch& scratch) const {
    check_finite(x);
    if (x.size() != d_) throw std::invalid_argument("rff: dimension mismatch");
    if (out.size() != output_dim()) throw std::invalid_argument("rff: output size mismatch");
    ensure(scratch.a, n_features_);
    for (std::size_t j = 0; j < n_features_; ++j) {
        const double* row = w_.data() + j * d_;
        double acc = 0.0;
        for (std::size_t i = 0; i < d_; ++i) acc += row[i] * x[i];
        scratch.a[j] = acc * inv_sigma_;
    }
    psi_into(std::span<const double>(scratch.a.data(), n_features_), out);
}

FjltRffMap::FjltRffMap(std::uint64_t seed, std::size_t d_eps, std::size_t n_features,
                       std::size_t d, double sigma)
    : d_(d),
      padded_(next_pow2(d)),
      fjlt_sign_(sample_sign_diagonal({seed, "FJLT-D"}, padded_)),
      fjlt_sub_(sample_subsampler({seed, "FJLT-S"}, d_eps, padded_)),
      rff_({seed, "W"}, n_features, d_eps, sigma) {}

void FjltRffMap::features(std::span<const double> x, std::span<double> out,
                          FeatureScratch& scratch) const {
    check_finite(x);
    if (x.size() != d_) throw std::invalid_argument("fjlt_rff: dimension mismatch");
    scaled_pad(x, 1.0, scratch.a, padded_);
    ensure(scratch.b, fjlt_sub_.size());
    std::span<double> reduced(scratch.b.data(), fjlt_sub_.size());
    apply_fjlt(fjlt_sign_, fjlt_sub_, std::span<double>(scratch.a.data(), padded_), reduced);
    rff_.features(reduced, out, scratch);
}

FastfoodMap::FastfoodMap(std::uint64_t seed, std::size_t d, std::size_t ell, double sigma,
                         bool full_variant)
    : d_(d), inv_sigma_(1.0 / sigma), op_(make_fastfood(seed, "1", next_pow2(d), full_variant)) {
    if (!(sigma > 0.0)) throw std::invalid_argument("fastfood: sigma must be > 0");
    if (ell == 0) throw std::invalid_argument("fastfood: ell must be >= 1");
    sub_ = sample_subsampler({seed, "S1"}, ell, op_.dim());
}

void FastfoodMap::features(std::span<const double> x, std::span<double> out,
                           FeatureScratch& scratch) const {
    check_finite(x);
    if (x.size() != d_) throw std::invalid_argument("fastfood: dimension mismatch");
    if (out.size() != output_dim()) throw std::invalid_argument("fastfood: output size mismatch");
    const std::size_t m = op_.dim();
    scaled_pad(x, kSqrt2 * inv_sigma_, scratch.a, m);
    ensure(scratch.b, m);
    op_.apply(std::span<double>(scratch.a.data(), m), std::span<double>(scratch.b.data(), m));
    ensure(scratch.b, sub_.size());
    for (std::size_t i = 0; i < sub_.size(); ++i) scratch.b[i] = scratch.a[sub_.indices[i]];
    psi_into(std::span<const double>(scratch.b.data(), sub_.size()), out);
}

std::vector<double> phi_embed(const EmbeddingParams& params, std::span<const double> x) {
    ComposedMap map(params);
    FeatureScratch scratch;
    std::vector<double> out(2 * params.m);
    map.phi(x, out, scratch);
    return out;
}

std::vector<double> spherical_embed(const EmbeddingParams& params, std::span<const double> x) {
    ComposedMap map(params);
    FeatureScratch scratch;
    std::vector<double> out(2 * params.m);
    map.spherical(x, out, scratch);
    return out;
}

std::vector<double> compose_K(const EmbeddingParams& params, std::span<const double> x) {
    ComposedMap map(params);
    FeatureScratch scratch;
    std::vector<double> out(params.output_dim());
    map.compose(x, out, scratch);
    return out;
}

std::vector<double> rff_features(const RngSeed& seed, std::size_t n_features, double sigma,
                                 std::span<const double> x) {
    RffMap map(seed, n_features, x.size(), sigma);
    FeatureScratch scratch;
    std::vector<double> out(map.output_dim());
    map.features(x, out, scratch);
    return out;
}

std::vector<double> fjlt_rff_features(std::uint64_t seed, std::size_t d_eps,
                                      std::span<const double> x) {
    const std::size_t nf = d_eps;  // baseline default: as many features as reduced dims
    FjltRffMap map(seed, d_eps, nf, x.size(), 1.0);
    FeatureScratch scratch;
    std::vector<double> out(map.output_dim());
    map.features(x, out, scratch);
    return out;
}

EmbeddingDiagnostics embedding_diagnostics(const EmbeddingParams& params,
                                           std::span<const double> x,
                                           std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("diagnostics: dimension mismatch");
    ComposedMap map(params);
    FeatureScratch scratch;
    const std::size_t m = params.m;

    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
    std::vector<double> vz(m);
    map.inner_transform(z, vz);

    EmbeddingDiagnostics diag;
    for (double v : vz) {
        const double v2 = v * v;
        diag.Q += v2;
        diag.W += v2 * v2;
    }
    diag.Q /= static_cast<double>(m);
    diag.W /= static_cast<double>(m);

    std::vector<double> fx(2 * m), fy(2 * m);
    map.phi(x, fx, scratch);
    map.phi(y, fy, scratch);
    for (std::size_t i = 0; i < fx.size(); ++i) {
        const double dlt = fx[i] - fy[i];
        diag.dist_sq += dlt * dlt;
    }
    return diag;
}

std::size_t rff_feature_count(double epsilon, double eta) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("rff_feature_count: epsilon must be > 0");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("rff_feature_count: eta in (0,1)");
    const double base = std::ceil(1.0 / (epsilon * epsilon));
    const double logs = std::max(1.0, std::ceil(std::log(1.0 / eta)));
    return static_cast<std::size_t>(base * logs);
}

}  // namespace kdesketch
