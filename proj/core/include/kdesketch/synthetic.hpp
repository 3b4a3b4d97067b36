#pragma once

#include <cstdint>

#include "kdesketch/kde.hpp"

namespace kdesketch {

// Gaussian-mixture generator for datasets and held-out queries, globally
// rescaled to fit inside the origin-centered ball of diameter delta_bound.
struct MixtureConfig {
    std::size_t n = 1000;
    std::size_t d = 16;
    double delta_bound = 4.0;
    double sigma = 1.0;
    std::size_t components = 4;
    double spread = 0.25;  // cluster stddev as a fraction of the ball radius
    std::uint64_t seed = 0;
};

Dataset make_gaussian_mixture(const MixtureConfig& config);

// Query points inside the same ball: half near mixture centers, half spread
// across the ball. Row-major n_queries x d.
std::vector<double> sample_queries(const MixtureConfig& config, std::size_t n_queries);

}  // namespace kdesketch
