#include <doctest.h>

#include <cstdlib>

#include "kdesketch/certify.hpp"
#include "kdesketch/synthetic.hpp"
#include "kdesketch/threading.hpp"

using namespace kdesketch;

TEST_CASE("undersized working dimension fails contraction (negative control)") {
    CertifyConfig config;
    config.d = 512;
    config.epsilon = 0.1;
    config.eta = 0.01;
    config.lambda = 4.0;
    config.trials = 500;
    config.seed = 3;
    config.force_m = 512 / 4;

    const CertifyReport report = certify_embedding(config);
    CHECK(report.m == 128);
    const SuiteResult* contraction = report.suite("contraction");
    REQUIRE(contraction != nullptr);
    CHECK(contraction->rate > contraction->threshold);
    CHECK_FALSE(report.all_pass);
}

TEST_CASE("certify rejects too few trials") {
    CertifyConfig config;
    config.trials = 10;
    CHECK_THROWS_AS(certify_embedding(config), std::invalid_argument);
}

TEST_CASE("generated mixtures respect the declared ball") {
    MixtureConfig mc;
    mc.n = 1000;
    mc.d = 12;
    mc.delta_bound = 5.0;
    mc.seed = 9;
    const Dataset data = make_gaussian_mixture(mc);
    CHECK(data.verify_diameter());

    const auto queries = sample_queries(mc, 200);
    const double radius = mc.delta_bound / 2.0;
    for (std::size_t i = 0; i < 200; ++i) {
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < mc.d; ++k) {
            const double v = queries[i * mc.d + k];
            norm_sq += v * v;
        }
        CHECK(norm_sq <= radius * radius * (1.0 + 1e-12));
    }
}

TEST_CASE("thread count resolution honors the environment fallback") {
    ::setenv("KDE_SKETCH_THREADS", "3", 1);
    CHECK(effective_threads(0) == 3);
    CHECK(effective_threads(5) == 5);  // explicit request wins
    ::unsetenv("KDE_SKETCH_THREADS");
    CHECK(effective_threads(0) >= 1);
}
