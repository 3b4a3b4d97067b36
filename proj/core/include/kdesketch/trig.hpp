#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kdesketch {

// Batched sin/cos over a vector of arguments. Cody-Waite reduction with a
// 33-bit split of pi/2, so results are accurate (<= ~2 ulp) for |x| up to
// about 2^20; beyond that accuracy degrades and is out of warranty.
// The loops are branch-free and auto-vectorize.
void sincos_batch(std::span<const double> x, std::span<double> sin_out,
                  std::span<double> cos_out);

// Cosine-only variant for diagnostics that sum 1 - cos.
void cos_batch(std::span<const double> x, std::span<double> cos_out);

// The normalized sine/cosine pair map: out[2j] = cos(v[j])/sqrt(len),
// out[2j+1] = sin(v[j])/sqrt(len). out.size() must be 2*v.size().
// Output has unit Euclidean norm up to rounding.
void psi_into(std::span<const double> v, std::span<double> out);

std::vector<double> psi(std::span<const double> v);

}  // namespace kdesketch
