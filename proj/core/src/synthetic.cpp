#include "kdesketch/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "kdesketch/rng.hpp"

namespace kdesketch {

namespace {

std::vector<double> mixture_centers(const MixtureConfig& config) {
    RandomStream rs(config.seed, "centers");
    const double radius = config.delta_bound / 2.0;
    std::vector<double> centers(config.components * config.d);
    for (std::size_t c = 0; c < config.components; ++c) {
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < config.d; ++k) {
            const double v = rs.normal();
            centers[c * config.d + k] = v;
            norm_sq += v * v;
        }
        // Direction uniform on the sphere, radius uniform in [0, 0.6 R].
        const double r = 0.6 * radius * rs.uniform01();
        const double scale = r / std::sqrt(norm_sq);
        for (std::size_t k = 0; k < config.d; ++k) centers[c * config.d + k] *= scale;
    }
    return centers;
}

// Rescale rows so every point lies strictly inside the ball of the given radius.
void fit_into_ball(std::vector<double>& rows, std::size_t d, double radius) {
    double max_norm_sq = 0.0;
    for (std::size_t i = 0; i < rows.size() / d; ++i) {
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double v = rows[i * d + k];
            norm_sq += v * v;
        }
        max_norm_sq = std::max(max_norm_sq, norm_sq);
    }
    const double max_norm = std::sqrt(max_norm_sq);
    if (max_norm > radius * 0.999) {
        const double scale = radius * 0.999 / max_norm;
        for (double& v : rows) v *= scale;
    }
}

}  // namespace

Dataset make_gaussian_mixture(const MixtureConfig& config) {
    if (config.n == 0) throw std::invalid_argument("mixture: n must be >= 1");
    if (config.d == 0) throw std::invalid_argument("mixture: d must be >= 1");
    if (!(config.delta_bound > 0.0)) throw std::invalid_argument("mixture: delta_bound must be > 0");
    if (!(config.sigma > 0.0)) throw std::invalid_argument("mixture: sigma must be > 0");
    if (config.components == 0) throw std::invalid_argument("mixture: components must be >= 1");

    const double radius = config.delta_bound / 2.0;
    const double stddev = config.spread * radius / std::sqrt(static_cast<double>(config.d));
    const std::vector<double> centers = mixture_centers(config);

    RandomStream rs(config.seed, "points");
    Dataset data;
    data.n = config.n;
    data.d = config.d;
    data.sigma = config.sigma;
    data.delta_bound = config.delta_bound;
    data.points.resize(config.n * config.d);
    for (std::size_t i = 0; i < config.n; ++i) {
        const std::size_t c = rs.below(config.components);
        for (std::size_t k = 0; k < config.d; ++k) {
            data.points[i * config.d + k] = centers[c * config.d + k] + stddev * rs.normal();
        }
    }
    fit_into_ball(data.points, config.d, radius);
    return data;
}

std::vector<double> sample_queries(const MixtureConfig& config, std::size_t n_queries) {
    if (n_queries == 0) throw std::invalid_argument("queries: n_queries must be >= 1");
    const double radius = config.delta_bound / 2.0;
    const double stddev = config.spread * radius / std::sqrt(static_cast<double>(config.d));
    const std::vector<double> centers = mixture_centers(config);

    RandomStream rs(config.seed, "queries");
    std::vector<double> rows(n_queries * config.d);
    for (std::size_t i = 0; i < n_queries; ++i) {
        if (i % 2 == 0) {
            const std::size_t c = rs.below(config.components);
            for (std::size_t k = 0; k < config.d; ++k) {
                rows[i * config.d + k] = centers[c * config.d + k] + stddev * rs.normal();
            }
        } else {
            double norm_sq = 0.0;
            for (std::size_t k = 0; k < config.d; ++k) {
                const double v = rs.normal();
                rows[i * config.d + k] = v;
                norm_sq += v * v;
            }
            const double r = 0.9 * radius * rs.uniform01();
            const double scale = r / std::sqrt(norm_sq);
            for (std::size_t k = 0; k < config.d; ++k) rows[i * config.d + k] *= scale;
        }
    }
    fit_into_ball(rows, config.d, radius);
    return rows;
}

}  // namespace kdesketch
