#include <CLI11.hpp>

#include "commands.hpp"
#include "kdesketch/threading.hpp"

namespace {

void add_constant_flags(CLI::App* cmd, kdesketch::EmbeddingConstants& consts) {
    cmd->add_option("--c-log", consts.c_log, "scale constant c in s = sqrt(eps/(c ln(1/eps)))");
    cmd->add_option("--c-m", consts.c_m, "multiplier on the working dimension m");
    cmd->add_option("--log-exponent", consts.log_exponent,
                    "exponent on the polylog factor in m (0 disables it)");
    cmd->add_flag("--full-fastfood", consts.full_fastfood,
                  "use the full Fastfood variant with permutation and scaling");
    cmd->add_flag("--outer-subsample", consts.outer_subsample,
                  "subsample the final transform to ell_out rows before the trig map");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kdesketch: Hadamard-transform feature maps and KDE sketches"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string format = "csv";
    app.add_option("--seed", seed, "master RNG seed")->capture_default_str();
    app.add_option("--threads", threads,
                   "worker threads (0 = KDE_SKETCH_THREADS env or hardware)");
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    kdesketch::cli::GenOptions gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate a Gaussian-mixture dataset");
    cmd_gen->add_option("--n", gen.n, "number of points")->required();
    cmd_gen->add_option("--d", gen.d, "dimension")->required();
    cmd_gen->add_option("--delta", gen.delta_bound, "diameter bound of the data ball");
    cmd_gen->add_option("--sigma", gen.sigma, "kernel bandwidth");
    cmd_gen->add_option("--components", gen.components, "mixture components");
    cmd_gen->add_option("--spread", gen.spread, "cluster stddev as fraction of radius");
    cmd_gen->add_option("--n-queries", gen.n_queries, "held-out query count");
    cmd_gen->add_option("--out", gen.out, "dataset output path")->required();
    cmd_gen->add_option("--queries-out", gen.queries_out, "held-out queries output path");

    kdesketch::cli::BuildOptions build;
    auto* cmd_build = app.add_subcommand("build", "build a sketch from a dataset");
    cmd_build->add_option("--dataset", build.dataset, "input dataset (.kds)")->required();
    cmd_build->add_option("--out", build.out, "sketch output path (.ksk)")->required();
    cmd_build->add_option("--method", build.method, "rff | fjlt-rff | fastfood | ours");
    cmd_build->add_option("--epsilon", build.epsilon, "target additive error");
    cmd_build->add_option("--delta", build.delta, "failure probability");
    cmd_build->add_flag("--coreset", build.coreset, "subsample a coreset before building");
    cmd_build->add_option("--dp", build.dp_epsilon, "eps_DP for a private function release");
    cmd_build->add_option("--imq", build.imq_beta, "IMQ kernel exponent beta");
    cmd_build->add_option("--rff-features", build.rff_features,
                          "override the RFF baseline feature count");
    cmd_build->add_flag("--check-diameter", build.check_diameter,
                        "verify all pairwise distances against the declared bound (O(n^2))");
    add_constant_flags(cmd_build, build.consts);

    kdesketch::cli::QueryOptions query;
    auto* cmd_query = app.add_subcommand("query", "answer KDE queries from a sketch");
    cmd_query->add_option("--sketch", query.sketch, "sketch file")->required();
    cmd_query->add_option("--queries", query.queries, "query points (.kds)")->required();
    cmd_query->add_option("--out", query.out, "output CSV (default stdout)");

    kdesketch::cli::CertifyOptions certify;
    auto* cmd_certify =
        app.add_subcommand("certify-embedding", "run the embedding's statistical suites");
    cmd_certify->add_option("--d", certify.d, "input dimension");
    cmd_certify->add_option("--epsilon", certify.epsilon, "distortion parameter");
    cmd_certify->add_option("--eta", certify.eta, "per-pair failure probability");
    cmd_certify->add_option("--lambda", certify.lambda, "embedded diameter bound");
    cmd_certify->add_option("--trials", certify.trials, "trials per suite")
        ->check(CLI::Range(std::size_t{100}, std::size_t{1000000}));
    cmd_certify->add_option("--force-m", certify.force_m,
                            "override the derived working dimension (negative control)");
    cmd_certify->add_option("--out", certify.out, "output path (default stdout)");
    add_constant_flags(cmd_certify, certify.consts);

    kdesketch::cli::BenchOptions bench;
    auto* cmd_bench = app.add_subcommand("bench", "time builds/queries and measure errors");
    cmd_bench->add_option("--dataset", bench.dataset, "input dataset (.kds)")->required();
    cmd_bench->add_option("--queries", bench.queries, "query points (.kds)");
    cmd_bench->add_option("--methods", bench.methods, "methods to compare")->delimiter(',');
    cmd_bench->add_option("--epsilons", bench.epsilons, "epsilon grid")->delimiter(',');
    cmd_bench->add_option("--delta", bench.delta, "failure probability");
    cmd_bench->add_option("--timed-queries", bench.timed_queries, "queries in the timing loop");
    cmd_bench->add_option("--warmup", bench.warmup, "warmup queries before timing");
    cmd_bench->add_option("--error-queries", bench.error_queries,
                          "queries compared against the exact oracle");
    cmd_bench->add_option("--rff-features", bench.rff_features,
                          "override the RFF baseline feature count");
    cmd_bench->add_option("--out", bench.out, "output path (default stdout)");
    add_constant_flags(cmd_bench, bench.consts);

    auto* cmd_selftest = app.add_subcommand("selftest", "quick internal consistency checks");

    CLI11_PARSE(app, argc, argv);

    kdesketch::set_default_threads(threads);
    gen.seed = seed;
    build.seed = seed;
    certify.seed = seed;
    bench.seed = seed;
    certify.format = format;
    bench.format = format;

    try {
        if (cmd_gen->parsed()) return kdesketch::cli::cmd_gen(gen);
        if (cmd_build->parsed()) return kdesketch::cli::cmd_build(build);
        if (cmd_query->parsed()) return kdesketch::cli::cmd_query(query);
        if (cmd_certify->parsed()) return kdesketch::cli::cmd_certify(certify);
        if (cmd_bench->parsed()) return kdesketch::cli::cmd_bench(bench);
        if (cmd_selftest->parsed()) return kdesketch::cli::cmd_selftest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
