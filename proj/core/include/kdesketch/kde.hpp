#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "kdesketch/features.hpp"

namespace kdesketch {

// A finite point set with a declared diameter bound and kernel bandwidth.
// All points are expected to lie in the origin-centered ball of diameter
// delta_bound; effective_diameter() = delta_bound / sigma parameterizes the
// structured methods.
struct Dataset {
    std::vector<double> points;  // row-major n x d
    std::size_t n = 0;
    std::size_t d = 0;
    double sigma = 1.0;
    double delta_bound = 0.0;

    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * d, d};
    }
    double effective_diameter() const { return delta_bound / sigma; }

    // O(n^2) verification that all pairwise distances are <= delta_bound.
    bool verify_diameter() const;
};

enum class Method : std::uint8_t { RFF = 0, FJLT_RFF = 1, FASTFOOD = 2, OURS = 3 };

const char* method_name(Method m);
Method method_from_name(std::string_view name);

struct SketchConfig {
    Method method = Method::OURS;
    double epsilon = 0.1;
    double delta = 0.1;
    std::uint64_t seed = 0;
    EmbeddingConstants consts;
    std::size_t rff_features = 0;  // 0 = derive from (epsilon, eta)
    double sigma_override = 0.0;   // 0 = use dataset sigma (IMQ banks override)
    bool check_diameter = false;
};

// Type-erased per-point feature map, bandwidth handling included.
class PointFeatureMap {
public:
    virtual ~PointFeatureMap() = default;
    virtual std::size_t output_dim() const = 0;
    virtual void features(std::span<const double> x, std::span<double> out,
                          FeatureScratch& scratch) const = 0;
};

// The KDE data structure: the stored mean feature vector plus everything
// needed to re-derive the feature map from seeds.
struct KdeSketch {
    Method method = Method::OURS;
    std::vector<double> mean_features;
    std::size_t n_points = 0;
    std::size_t d = 0;
    double sigma = 1.0;
    double delta_bound = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double eta = 0.0;  // per-pair budget delta / n
    std::uint64_t seed = 0;
    EmbeddingConstants consts;
    std::size_t rff_features = 0;   // RFF / FJLT_RFF
    std::size_t d_eps = 0;          // FJLT_RFF reduced dimension
    std::size_t fastfood_ell = 0;   // FASTFOOD subsampled rows
    EmbeddingParams embedding;      // OURS

    std::shared_ptr<const PointFeatureMap> map;  // rebuilt from seeds on load
};

// Rebuilds the sketch's feature map from its stored seeds/dimensions.
std::shared_ptr<const PointFeatureMap> make_feature_map(const KdeSketch& sketch);

// Builds F(X) = (1/|X|) sum f(x) with per-pair failure budget eta = delta/n
// and a fixed-topology pairwise-tree mean (thread-count independent).
KdeSketch build_sketch(const Dataset& data, const SketchConfig& config);

struct QueryResult {
    double estimate = 0.0;
    bool outside_region = false;  // query not in the declared ball; guarantees void
};

QueryResult query_ex(const KdeSketch& sketch, std::span<const double> y);
double query(const KdeSketch& sketch, std::span<const double> y);

struct Kernel {
    enum class Type { Gaussian, Imq } type = Type::Gaussian;
    double beta = 1.0;  // IMQ exponent
    static Kernel gaussian() { return {Type::Gaussian, 1.0}; }
    static Kernel imq(double beta) { return {Type::Imq, beta}; }
};

// Exact mean kernel value by direct summation; the ground-truth oracle.
double exact_kde(const Dataset& data, std::span<const double> y, const Kernel& kernel);

// Uniform subsample (with replacement) of size ceil(ln(2/delta)/(2 eps^2));
// returns the data unchanged when it is already at most that size.
Dataset coreset_subsample(const Dataset& data, double epsilon, double delta,
                          std::uint64_t seed);
std::size_t coreset_size(double epsilon, double delta);

}  // namespace kdesketch
