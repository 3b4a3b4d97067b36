#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kdesketch/rng.hpp"

namespace kdesketch {

// Diagonal of i.i.d. uniform signs; entries stored as +-1.0 for cheap
// elementwise products.
struct SignDiagonal {
    std::vector<double> signs;
    std::size_t size() const { return signs.size(); }
};

// Diagonal of i.i.d. standard normals, immutable after sampling.
struct GaussianDiagonal {
    std::vector<double> weights;
    std::size_t size() const { return weights.size(); }
};

// Row subsampler: indices drawn i.i.d. uniform (with replacement) from [0, m).
struct Subsampler {
    std::vector<std::uint32_t> indices;
    std::size_t size() const { return indices.size(); }
};

SignDiagonal sample_sign_diagonal(const RngSeed& seed, std::size_t m);
GaussianDiagonal sample_gaussian_diagonal(const RngSeed& seed, std::size_t m);
Subsampler sample_subsampler(const RngSeed& seed, std::size_t ell, std::size_t m);

// The Fastfood linear operator V = sqrt(m) * H G H B, applied in place in
// O(m log m). The optional permutation and scaling give the full variant
// sqrt(m) * Sigma H G Pi H B; both are off in the canonical minimal form.
struct FastfoodOperator {
    SignDiagonal sign;           // B
    GaussianDiagonal gauss;      // G
    std::vector<std::uint32_t> perm;    // Pi, empty when unused
    std::vector<double> scaling;        // Sigma, empty when unused

    std::size_t dim() const { return sign.size(); }
    // x.size() must equal dim(). scratch must have dim() capacity when the
    // permutation is enabled; unused otherwise.
    void apply(std::span<double> x, std::span<double> scratch = {}) const;
};

// seed_value keys the four streams "B<tag>", "G<tag>" (and "Pi<tag>",
// "Sigma<tag>" for the full variant).
FastfoodOperator make_fastfood(std::uint64_t seed_value, std::string_view tag,
                               std::size_t m, bool full_variant = false);

void apply_fastfood(const SignDiagonal& B, const GaussianDiagonal& G,
                    std::span<double> x);

// FJLT A = sqrt(m/ell) * S H D. x is clobbered (holds H D x on return);
// the projected vector is written to out (size ell).
void apply_fjlt(const SignDiagonal& D, const Subsampler& S, std::span<double> x,
                std::span<double> out);
std::vector<double> apply_fjlt(const SignDiagonal& D, const Subsampler& S,
                               std::span<double> x);

// High-probability bound on ||H B z||_inf: ||z||_2 * sqrt(2 ln(2m/eta) / m).
// Accepts eta in (0, 1].
double flattening_bound(double z_norm, std::size_t m, double eta);

}  // namespace kdesketch
