#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kdesketch/threading.hpp"

namespace kdesketch {

// Fixed-topology pairwise vector summation. Vectors are pushed in index
// order; merges follow the binary-counter pattern, so the summation tree
// depends only on the number of pushes, never on thread count or timing.
class PairwiseVectorSum {
public:
    explicit PairwiseVectorSum(std::size_t dim) : dim_(dim) {}

    void push(std::span<const double> v) {
        if (v.size() != dim_) throw std::invalid_argument("PairwiseVectorSum: dimension mismatch");
        std::vector<double> carry(v.begin(), v.end());
        std::size_t level = 0;
        for (;;) {
            if (level == levels_.size()) {
                levels_.emplace_back(std::move(carry));
                break;
            }
            if (!levels_[level].has_value()) {
                levels_[level] = std::move(carry);
                break;
            }
            auto& held = *levels_[level];
            for (std::size_t i = 0; i < dim_; ++i) carry[i] += held[i];
            levels_[level].reset();
            ++level;
        }
        ++count_;
    }

    std::size_t count() const { return count_; }

    // Folds the remaining partial sums from the lowest level up.
    std::vector<double> total() const {
        std::vector<double> acc;
        for (const auto& lvl : levels_) {
            if (!lvl.has_value()) continue;
            if (acc.empty()) {
                acc = *lvl;
            } else {
                for (std::size_t i = 0; i < dim_; ++i) acc[i] += (*lvl)[i];
            }
        }
        if (acc.empty()) acc.assign(dim_, 0.0);
        return acc;
    }

private:
    std::size_t dim_;
    std::size_t count_ = 0;
    std::vector<std::optional<std::vector<double>>> levels_;
};

// Mean of producer(i, slot, out) over i in [0, n), computed wave-by-wave: a
// wave of vectors is produced in parallel (slot indexes wave-local storage,
// e.g. per-slot scratch buffers), then pushed sequentially in index order.
// The result is bit-identical for every thread count.
inline std::vector<double> deterministic_mean(
    std::size_t n, std::size_t dim,
    const std::function<void(std::size_t, std::size_t, std::span<double>)>& producer,
    unsigned threads = 0) {
    if (n == 0) throw std::invalid_argument("deterministic_mean: empty input");
    const unsigned t = threads > 0 ? threads : default_threads();
    const std::size_t wave = std::max<std::size_t>(std::size_t{4} * t, 8);

    PairwiseVectorSum acc(dim);
    std::vector<std::vector<double>> slots(std::min(wave, n), std::vector<double>(dim));
    for (std::size_t lo = 0; lo < n; lo += wave) {
        const std::size_t hi = std::min(lo + wave, n);
        parallel_for(hi - lo,
                     [&](std::size_t k) { producer(lo + k, k, slots[k]); },
                     t);
        for (std::size_t k = 0; k < hi - lo; ++k) acc.push(slots[k]);
    }
    std::vector<double> mean = acc.total();
    const double inv = 1.0 / static_cast<double>(n);
    for (double& x : mean) x *= inv;
    return mean;
}

}  // namespace kdesketch
