#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kdesketch {

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Smallest power of two >= n. Throws std::invalid_argument for n == 0.
std::size_t next_pow2(std::size_t n);

// In-place normalized fast Walsh-Hadamard transform (natural ordering).
// v.size() must be a power of two; throws std::invalid_argument otherwise.
// The transform is orthogonal, symmetric and its own inverse:
// ||fwht(v)||_2 == ||v||_2 and fwht(fwht(v)) == v up to rounding.
void fwht(std::span<double> v);

// Unnormalized butterfly passes only (entries +-1); callers that chain two
// transforms can fold both m^{-1/2} factors into a single scale.
void fwht_unscaled(std::span<double> v);

// Copies x into a length-m buffer, zero-filling the tail. Requires m >= x.size()
// and m a power of two.
std::vector<double> zero_pad(std::span<const double> x, std::size_t m);

}  // namespace kdesketch
