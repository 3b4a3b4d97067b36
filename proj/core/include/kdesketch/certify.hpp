#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdesketch/features.hpp"

namespace kdesketch {

// Monte-Carlo certification of the spherical embedding: expansion,
// contraction, collapse and Q-concentration rates over fresh operator draws
// for fixed difference vectors.
struct CertifyConfig {
    std::size_t d = 512;
    double epsilon = 0.1;
    double eta = 0.01;
    double lambda = 4.0;
    std::size_t trials = 2000;  // per suite
    std::uint64_t seed = 1;
    EmbeddingConstants consts;
    std::size_t force_m = 0;  // nonzero: override the derived m (negative controls)
};

struct SuiteResult {
    std::string name;
    std::size_t trials = 0;
    std::size_t violations = 0;
    double rate = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct CertifyReport {
    std::size_t d = 0;
    std::size_t m = 0;
    double epsilon = 0.0, eta = 0.0, lambda = 0.0;
    std::vector<SuiteResult> suites;
    bool all_pass = false;

    const SuiteResult* suite(const std::string& name) const;
};

CertifyReport certify_embedding(const CertifyConfig& config);

}  // namespace kdesketch
