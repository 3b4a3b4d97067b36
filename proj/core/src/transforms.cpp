#include "kdesketch/transforms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kdesketch/hadamard.hpp"

namespace kdesketch {

SignDiagonal sample_sign_diagonal(const RngSeed& seed, std::size_t m) {
    if (m == 0) throw std::invalid_argument("sample_sign_diagonal: m must be >= 1");
    RandomStream rs(seed);
    SignDiagonal d;
    d.signs.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        d.signs[i] = (rs.next_u64() & 1) ? 1.0 : -1.0;
    }
    return d;
}

GaussianDiagonal sample_gaussian_diagonal(const RngSeed& seed, std::size_t m) {
    if (m == 0) throw std::invalid_argument("sample_gaussian_diagonal: m must be >= 1");
    RandomStream rs(seed);
    GaussianDiagonal d;
    d.weights.resize(m);
    for (std::size_t i = 0; i < m; ++i) d.weights[i] = rs.normal();
    return d;
}

Subsampler sample_subsampler(const RngSeed& seed, std::size_t ell, std::size_t m) {
    if (ell == 0 || m == 0) throw std::invalid_argument("sample_subsampler: dimensions must be >= 1");
    RandomStream rs(seed);
    Subsampler s;
    s.indices.resize(ell);
    for (std::size_t i = 0; i < ell; ++i) {
        s.indices[i] = static_cast<std::uint32_t>(rs.below(m));
    }
    return s;
}

void FastfoodOperator::apply(std::span<double> x, std::span<double> scratch) const {
    const std::size_t m = dim();
    if (x.size() != m || gauss.size() != m) {
        throw std::invalid_argument("fastfood: dimension mismatch");
    }
    for (std::size_t i = 0; i < m; ++i) x[i] *= sign.signs[i];
    fwht_unscaled(x);
    if (!perm.empty()) {
        std::vector<double> fallback;
        double* tmp;
        if (scratch.size() >= m) {
            tmp = scratch.data();
        } else {
            fallback.resize(m);
            tmp = fallback.data();
        }
        for (std::size_t i = 0; i < m; ++i) tmp[i] = x[perm[i]];
        for (std::size_t i = 0; i < m; ++i) x[i] = tmp[i];
    }
    for (std::size_t i = 0; i < m; ++i) x[i] *= gauss.weights[i];
    fwht_unscaled(x);
    // Two unscaled passes contribute a factor m; sqrt(m)*H*...*H needs
    // sqrt(m) * (1/m) overall, i.e. m^{-1/2}.
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    if (scaling.empty()) {
        for (std::size_t i = 0; i < m; ++i) x[i] *= scale;
    } else {
        for (std::size_t i = 0; i < m; ++i) x[i] *= scale * scaling[i];
    }
}

FastfoodOperator make_fastfood(std::uint64_t seed_value, std::string_view tag,
                               std::size_t m, bool full_variant) {
    FastfoodOperator op;
    op.sign = sample_sign_diagonal({seed_value, "B" + std::string(tag)}, m);
    op.gauss = sample_gaussian_diagonal({seed_value, "G" + std::string(tag)}, m);
    if (full_variant) {
        // Pi: Fisher-Yates from its own stream.
        RandomStream prs(seed_value, "Pi" + std::string(tag));
        op.perm.resize(m);
        for (std::size_t i = 0; i < m; ++i) op.perm[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = m; i > 1; --i) {
            const std::size_t j = prs.below(i);
            std::swap(op.perm[i - 1], op.perm[j]);
        }
        // Sigma: rows rescaled to chi_m-distributed norms, Sigma_ii = chi_i/||g||.
        // chi_m via the Wilson-Hilferty cube approximation from one normal draw.
        double gnorm2 = 0.0;
        for (double g : op.gauss.weights) gnorm2 += g * g;
        const double gnorm = std::sqrt(gnorm2);
        RandomStream srs(seed_value, "Sigma" + std::string(tag));
        op.scaling.resize(m);
        const double md = static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double z = srs.normal();
            const double t = 1.0 - 2.0 / (9.0 * md) + z * std::sqrt(2.0 / (9.0 * md));
            const double chi2 = md * t * t * t;
            op.scaling[i] = std::sqrt(std::max(chi2, 0.0)) / gnorm;
        }
    }
    return op;
}

void apply_fastfood(const SignDiagonal& B, const GaussianDiagonal& G,
                    std::span<double> x) {
    FastfoodOperator op;
    op.sign = B;
    op.gauss = G;
    op.apply(x);
}

void apply_fjlt(const SignDiagonal& D, const Subsampler& S, std::span<double> x,
                std::span<double> out) {
    const std::size_t m = D.size();
    if (x.size() != m) throw std::invalid_argument("fjlt: dimension mismatch");
    if (out.size() != S.size()) throw std::invalid_argument("fjlt: output size mismatch");
    for (std::size_t i = 0; i < m; ++i) x[i] *= D.signs[i];
    fwht(x);  // normalized H, orthogonal
    const double scale = std::sqrt(static_cast<double>(m) / static_cast<double>(S.size()));
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (S.indices[i] >= m) throw std::invalid_argument("fjlt: subsampler index out of range");
        out[i] = scale * x[S.indices[i]];
    }
}

std::vector<double> apply_fjlt(const SignDiagonal& D, const Subsampler& S,
                               std::span<double> x) {
    std::vector<double> out(S.size());
    apply_fjlt(D, S, x, out);
    return out;
}

double flattening_bound(double z_norm, std::size_t m, double eta) {
    if (z_norm < 0.0) throw std::invalid_argument("flattening_bound: z_norm must be >= 0");
    if (m == 0) throw std::invalid_argument("flattening_bound: m must be >= 1");
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("flattening_bound: eta must be in (0, 1]");
    }
    const double md = static_cast<double>(m);
    return z_norm * std::sqrt(2.0 * std::log(2.0 * md / eta) / md);
}

}  // namespace kdesketch
