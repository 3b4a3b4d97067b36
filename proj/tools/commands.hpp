#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdesketch/features.hpp"

namespace kdesketch::cli {

struct GenOptions {
    std::size_t n = 1000;
    std::size_t d = 16;
    std::size_t n_queries = 100;
    double delta_bound = 4.0;
    double sigma = 1.0;
    std::size_t components = 4;
    double spread = 0.25;
    std::uint64_t seed = 1;
    std::string out;
    std::string queries_out;
};

struct BuildOptions {
    std::string dataset;
    std::string out;
    std::string method = "ours";
    double epsilon = 0.1;
    double delta = 0.1;
    std::uint64_t seed = 1;
    bool coreset = false;
    double dp_epsilon = 0.0;  // > 0 enables the private release
    double imq_beta = 0.0;    // > 0 enables the IMQ bank
    EmbeddingConstants consts;
    std::size_t rff_features = 0;
    bool check_diameter = false;
};

struct QueryOptions {
    std::string sketch;
    std::string queries;
    std::string out;  // empty = stdout
};

struct CertifyOptions {
    std::size_t d = 512;
    double epsilon = 0.1;
    double eta = 0.01;
    double lambda = 4.0;
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    std::size_t force_m = 0;
    EmbeddingConstants consts;
    std::string format = "csv";
    std::string out;  // empty = stdout
};

struct BenchOptions {
    std::string dataset;
    std::string queries;  // empty = synthesize from the dataset's geometry
    std::vector<std::string> methods = {"ours", "rff"};
    std::vector<double> epsilons = {0.25};
    double delta = 0.1;
    std::size_t timed_queries = 1000;
    std::size_t warmup = 10;
    std::size_t error_queries = 200;
    std::uint64_t seed = 1;
    EmbeddingConstants consts;
    std::size_t rff_features = 0;  // explicit baseline override
    std::string format = "csv";
    std::string out;  // empty = stdout
};

int cmd_gen(const GenOptions& options);
int cmd_build(const BuildOptions& options);
int cmd_query(const QueryOptions& options);
int cmd_certify(const CertifyOptions& options);
int cmd_bench(const BenchOptions& options);
int cmd_selftest();

}  // namespace kdesketch::cli
