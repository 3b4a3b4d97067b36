#include "kdesketch/kde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kdesketch/hadamard.hpp"
#include "kdesketch/reduction.hpp"
#include "kdesketch/rng.hpp"

namespace kdesketch {

namespace {

class OursMap final : public PointFeatureMap {
public:
    OursMap(const EmbeddingParams& params, double sigma) : map_(params, 1.0 / sigma) {}
    std::size_t output_dim() const override { return map_.output_dim(); }
    void features(std::span<const double> x, std::span<double> out,
                  FeatureScratch& scratch) const override {
        map_.compose(x, out, scratch);
    }

private:
    ComposedMap map_;
};

class RffAdapter final : public PointFeatureMap {
public:
    RffAdapter(std::uint64_t seed, std::size_t n_features, std::size_t d, double sigma)
        : map_({seed, "W"}, n_features, d, sigma) {}
    std::size_t output_dim() const override { return map_.output_dim(); }
    void features(std::span<const double> x, std::span<double> out,
                  FeatureScratch& scratch) const override {
        map_.features(x, out, scratch);
    }

private:
    RffMap map_;
};

class FjltRffAdapter final : public PointFeatureMap {
public:
    FjltRffAdapter(std::uint64_t seed, std::size_t d_eps, std::size_t n_features,
                   std::size_t d, double sigma)
        : map_(seed, d_eps, n_features, d, sigma) {}
    std::size_t output_dim() const override { return map_.output_dim(); }
    void features(std::span<const double> x, std::span<double> out,
                  FeatureScratch& scratch) const override {
        map_.features(x, out, scratch);
    }

private:
    FjltRffMap map_;
};

class FastfoodAdapter final : public PointFeatureMap {
public:
    FastfoodAdapter(std::uint64_t seed, std::size_t d, std::size_t ell, double sigma,
                    bool full_variant)
        : map_(seed, d, ell, sigma, full_variant) {}
    std::size_t output_dim() const override { return map_.output_dim(); }
    void features(std::span<const double> x, std::span<double> out,
                  FeatureScratch& scratch) const override {
        map_.features(x, out, scratch);
    }

private:
    FastfoodMap map_;
};

std::size_t fastfood_row_count(std::size_t m_pad, double epsilon, double eta,
                               double delta_sigma, const EmbeddingConstants& consts) {
    // Subsampled rows ~ diameter^2 / eps^2 with the shared polylog factor;
    // the sqrt(2) kernel scaling doubles squared distances.
    const double dd = static_cast<double>(m_pad);
    const double base = std::max(1.0, 2.0 * delta_sigma * delta_sigma) / (epsilon * epsilon);
    const double lf_base = std::ceil(std::log2(dd * std::max(1.0, delta_sigma) / (epsilon * eta) + 2.0));
    double lf = 1.0;
    for (int i = 0; i < consts.log_exponent; ++i) lf *= lf_base;
    const double raw = std::ceil(consts.c_m * base * lf);
    return std::min<std::size_t>(m_pad, next_pow2(static_cast<std::size_t>(std::max(1.0, raw))));
}

}  // namespace

bool Dataset::verify_diameter() const {
    const double bound_sq = delta_bound * delta_bound;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* a = points.data() + i * d;
            const double* b = points.data() + j * d;
            double dist_sq = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double delta = a[k] - b[k];
                dist_sq += delta * delta;
            }
            if (dist_sq > bound_sq * (1.0 + 1e-12)) return false;
        }
    }
    return true;
}

const char* method_name(Method m) {
    switch (m) {
        case Method::RFF: return "rff";
        case Method::FJLT_RFF: return "fjlt-rff";
        case Method::FASTFOOD: return "fastfood";
        case Method::OURS: return "ours";
    }
    return "?";
}

Method method_from_name(std::string_view name) {
    if (name == "rff") return Method::RFF;
    if (name == "fjlt-rff" || name == "fjlt_rff") return Method::FJLT_RFF;
    if (name == "fastfood") return Method::FASTFOOD;
    if (name == "ours") return Method::OURS;
    throw std::invalid_argument("unknown method: " + std::string(name));
}

std::shared_ptr<const PointFeatureMap> make_feature_map(const KdeSketch& sketch) {
    switch (sketch.method) {
        case Method::OURS:
            return std::make_shared<OursMap>(sketch.embedding, sketch.sigma);
        case Method::RFF:
            return std::make_shared<RffAdapter>(sketch.seed, sketch.rff_features, sketch.d,
                                                sketch.sigma);
        case Method::FJLT_RFF:
            return std::make_shared<FjltRffAdapter>(sketch.seed, sketch.d_eps,
                                                    sketch.rff_features, sketch.d, sketch.sigma);
        case Method::FASTFOOD:
            return std::make_shared<FastfoodAdapter>(sketch.seed, sketch.d, sketch.fastfood_ell,
                                                     sketch.sigma, sketch.consts.full_fastfood);
    }
    throw std::invalid_argument("make_feature_map: unknown method");
}

KdeSketch build_sketch(const Dataset& data, const SketchConfig& config) {
    if (data.n == 0) throw std::invalid_argument("build_sketch: empty dataset");
    if (data.d == 0) throw std::invalid_argument("build_sketch: zero-dimensional dataset");
    const double sigma = config.sigma_override > 0.0 ? config.sigma_override : data.sigma;
    if (!(sigma > 0.0)) throw std::invalid_argument("build_sketch: sigma must be > 0");
    if (!(config.epsilon > 0.0)) throw std::invalid_argument("build_sketch: epsilon must be > 0");
    if (!(config.delta > 0.0 && config.delta < 1.0)) {
        throw std::invalid_argument("build_sketch: delta must be in (0,1)");
    }
    if (config.check_diameter && !data.verify_diameter()) {
        throw std::invalid_argument("build_sketch: dataset violates declared diameter bound");
    }

    KdeSketch sketch;
    sketch.method = config.method;
    sketch.n_points = data.n;
    sketch.d = data.d;
    sketch.sigma = sigma;
    sketch.delta_bound = data.delta_bound;
    sketch.epsilon = config.epsilon;
    sketch.delta = config.delta;
    sketch.eta = config.delta / static_cast<double>(data.n);  // union bound over X
    sketch.seed = config.seed;
    sketch.consts = config.consts;

    const double delta_sigma = data.delta_bound / sigma;
    switch (config.method) {
        case Method::OURS: {
            sketch.embedding = EmbeddingParams::for_kde(data.d, config.epsilon, sketch.eta,
                                                        delta_sigma, config.seed, config.consts);
            break;
        }
        case Method::RFF: {
            sketch.rff_features = config.rff_features > 0
                                      ? config.rff_features
                                      : rff_feature_count(config.epsilon, sketch.eta);
            break;
        }
        case Method::FJLT_RFF: {
            sketch.rff_features = config.rff_features > 0
                                      ? config.rff_features
                                      : rff_feature_count(config.epsilon, sketch.eta);
            sketch.d_eps = static_cast<std::size_t>(
                std::ceil(1.0 / (config.epsilon * config.epsilon)));
            break;
        }
        case Method::FASTFOOD: {
            sketch.fastfood_ell = fastfood_row_count(next_pow2(data.d), config.epsilon,
                                                     sketch.eta, delta_sigma, config.consts);
            break;
        }
    }

    sketch.map = make_feature_map(sketch);
    const std::size_t dim = sketch.map->output_dim();

    const unsigned threads = default_threads();
    std::vector<FeatureScratch> scratches(std::max<std::size_t>(std::size_t{4} * threads, 8));
    sketch.mean_features = deterministic_mean(
        data.n, dim,
        [&](std::size_t i, std::size_t slot, std::span<double> out) {
            sketch.map->features(data.point(i), out, scratches[slot]);
        });
    return sketch;
}

QueryResult query_ex(const KdeSketch& sketch, std::span<const double> y) {
    if (y.size() != sketch.d) throw std::invalid_argument("query: dimension mismatch");
    if (!sketch.map) throw std::logic_error("query: sketch has no feature map attached");
    FeatureScratch scratch;
    std::vector<double> fy(sketch.map->output_dim());
    sketch.map->features(y, fy, scratch);
    double acc = 0.0;
    for (std::size_t i = 0; i < fy.size(); ++i) acc += sketch.mean_features[i] * fy[i];

    double norm_sq = 0.0;
    for (double v : y) norm_sq += v * v;
    const double radius = sketch.delta_bound / 2.0;
    return {acc, norm_sq > radius * radius * (1.0 + 1e-12)};
}

double query(const KdeSketch& sketch, std::span<const double> y) {
    return query_ex(sketch, y).estimate;
}

double exact_kde(const Dataset& data, std::span<const double> y, const Kernel& kernel) {
    if (data.n == 0) throw std::invalid_argument("exact_kde: empty dataset");
    if (y.size() != data.d) throw std::invalid_argument("exact_kde: dimension mismatch");
    if (!(data.sigma > 0.0)) throw std::invalid_argument("exact_kde: sigma must be > 0");
    const double inv_sigma_sq = 1.0 / (data.sigma * data.sigma);
    double acc = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
        const double* p = data.points.data() + i * data.d;
        double dist_sq = 0.0;
        for (std::size_t k = 0; k < data.d; ++k) {
            const double delta = p[k] - y[k];
            dist_sq += delta * delta;
        }
        const double r = dist_sq * inv_sigma_sq;
        acc += kernel.type == Kernel::Type::Gaussian ? std::exp(-r)
                                                     : std::pow(1.0 + r, -kernel.beta);
    }
    return acc / static_cast<double>(data.n);
}

std::size_t coreset_size(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("coreset: epsilon and delta must be in (0,1)");
    }
    // Hoeffding for [0,1]-valued kernels: per-query +-eps with prob 1-delta.
    return static_cast<std::size_t>(std::ceil(std::log(2.0 / delta) / (2.0 * epsilon * epsilon)));
}

Dataset coreset_subsample(const Dataset& data, double epsilon, double delta,
                          std::uint64_t seed) {
    const std::size_t target = coreset_size(epsilon, delta);
    if (data.n <= target) return data;
    RandomStream rs(seed, "coreset");
    Dataset out;
    out.n = target;
    out.d = data.d;
    out.sigma = data.sigma;
    out.delta_bound = data.delta_bound;
    out.points.resize(target * data.d);
    for (std::size_t i = 0; i < target; ++i) {
        const std::size_t src = rs.below(data.n);
        std::copy_n(data.points.data() + src * data.d, data.d, out.points.data() + i * data.d);
    }
    return out;
}

}  // namespace kdesketch
