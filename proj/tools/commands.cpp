#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "kdesketch/certify.hpp"
#include "kdesketch/dp.hpp"
#include "kdesketch/hadamard.hpp"
#include "kdesketch/imq.hpp"
#include "kdesketch/io.hpp"
#include "kdesketch/rng.hpp"
#include "kdesketch/synthetic.hpp"
#include "kdesketch/threading.hpp"
#include "kdesketch/trig.hpp"

namespace kdesketch::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

struct BenchRow {
    std::string method;
    std::size_t d = 0, n = 0;
    double sigma = 0, delta_bound = 0, epsilon = 0;
    double build_ms = 0, query_us_mean = 0, query_us_p99 = 0;
    double err_mean = 0, err_p95 = 0, err_max = 0;
    std::size_t seeds_used = 1;
};

}  // namespace

int cmd_gen(const GenOptions& options) {
    if (options.out.empty()) {
        std::cerr << "gen: --out is required\n";
        return 2;
    }
    MixtureConfig config;
    config.n = options.n;
    config.d = options.d;
    config.delta_bound = options.delta_bound;
    config.sigma = options.sigma;
    config.components = options.components;
    config.spread = options.spread;
    config.seed = options.seed;

    const Dataset data = make_gaussian_mixture(config);
    write_dataset(options.out, data);
    if (!options.queries_out.empty()) {
        Dataset queries;
        queries.n = options.n_queries;
        queries.d = options.d;
        queries.sigma = options.sigma;
        queries.delta_bound = options.delta_bound;
        queries.points = sample_queries(config, options.n_queries);
        write_dataset(options.queries_out, queries);
    }
    std::cerr << "gen: wrote " << data.n << " points (d=" << data.d << ") to " << options.out
              << "\n";
    return 0;
}

int cmd_build(const BuildOptions& options) {
    if (options.dataset.empty() || options.out.empty()) {
        std::cerr << "build: --dataset and --out are required\n";
        return 2;
    }
    if (options.dp_epsilon > 0.0 && options.imq_beta > 0.0) {
        std::cerr << "build: --dp and --imq cannot be combined\n";
        return 2;
    }

    Dataset data = read_dataset(options.dataset);
    if (options.coreset) {
        data = coreset_subsample(data, options.epsilon, options.delta, options.seed);
        std::cerr << "build: coreset of " << data.n << " points\n";
    }

    const auto start = Clock::now();
    if (options.dp_epsilon > 0.0) {
        const DpSketch sketch = dp_build(data, options.epsilon, options.delta,
                                         options.dp_epsilon, options.seed, options.consts);
        write_sketch(options.out, sketch);
        std::cerr << "build: dp release in " << fmt_g17(ms_since(start)) << " ms (ell="
                  << sketch.params.ell << ", L=" << fmt_g17(sketch.params.clip_level)
                  << ", b=" << fmt_g17(sketch.params.laplace_scale) << ")\n";
        return 0;
    }
    if (options.imq_beta > 0.0) {
        const ImqSketch sketch =
            imq_build(data, options.imq_beta, options.epsilon, options.delta, options.seed,
                      method_from_name(options.method), options.consts);
        write_sketch(options.out, sketch);
        std::cerr << "build: imq bank of " << sketch.bank.size() << " sketches in "
                  << fmt_g17(ms_since(start)) << " ms\n";
        return 0;
    }

    SketchConfig config;
    config.method = method_from_name(options.method);
    config.epsilon = options.epsilon;
    config.delta = options.delta;
    config.seed = options.seed;
    config.consts = options.consts;
    config.rff_features = options.rff_features;
    config.check_diameter = options.check_diameter;
    const KdeSketch sketch = build_sketch(data, config);
    write_sketch(options.out, sketch);
    std::cerr << "build: " << options.method << " sketch (dim "
              << sketch.mean_features.size() << ") in " << fmt_g17(ms_since(start)) << " ms\n";
    return 0;
}

int cmd_query(const QueryOptions& options) {
    if (options.sketch.empty() || options.queries.empty()) {
        std::cerr << "query: --sketch and --queries are required\n";
        return 2;
    }
    const SketchFile file = read_sketch_file(options.sketch);
    const Dataset queries = read_dataset(options.queries);

    const std::size_t expected_d = file.kind == SketchFile::Kind::Gaussian ? file.gaussian.d
                                   : file.kind == SketchFile::Kind::Imq    ? file.imq.d
                                                                           : file.dp.d;
    if (queries.d != expected_d) {
        std::cerr << "query: dimension mismatch (sketch d=" << expected_d
                  << ", queries d=" << queries.d << ")\n";
        return 1;
    }

    std::ofstream out_file;
    std::ostream& out = open_output(out_file, options.out);
    out << "query_id,estimate\n";
    for (std::size_t i = 0; i < queries.n; ++i) {
        double estimate = 0.0;
        switch (file.kind) {
            case SketchFile::Kind::Gaussian:
                estimate = query(file.gaussian, queries.point(i));
                break;
            case SketchFile::Kind::Imq:
                estimate = imq_query(file.imq, queries.point(i));
                break;
            case SketchFile::Kind::Dp:
                estimate = dp_query(file.dp, queries.point(i));
                break;
        }
        out << i << "," << fmt_g17(estimate) << "\n";
    }
    return 0;
}

int cmd_certify(const CertifyOptions& options) {
    CertifyConfig config;
    config.d = options.d;
    config.epsilon = options.epsilon;
    config.eta = options.eta;
    config.lambda = options.lambda;
    config.trials = options.trials;
    config.seed = options.seed;
    config.consts = options.consts;
    config.force_m = options.force_m;

    const CertifyReport report = certify_embedding(config);

    std::ofstream out_file;
    std::ostream& out = open_output(out_file, options.out);
    if (options.format == "json") {
        nlohmann::json j;
        j["d"] = report.d;
        j["m"] = report.m;
        j["epsilon"] = report.epsilon;
        j["eta"] = report.eta;
        j["lambda"] = report.lambda;
        j["all_pass"] = report.all_pass;
        j["suites"] = nlohmann::json::array();
        for (const auto& s : report.suites) {
            j["suites"].push_back({{"name", s.name},
                                   {"trials", s.trials},
                                   {"violations", s.violations},
                                   {"rate", s.rate},
                                   {"threshold", s.threshold},
                                   {"pass", s.pass}});
        }
        out << j.dump(2) << "\n";
    } else {
        out << "suite,trials,violations,rate,threshold,pass\n";
        for (const auto& s : report.suites) {
            out << s.name << "," << s.trials << "," << s.violations << "," << fmt_g17(s.rate)
                << "," << fmt_g17(s.threshold) << "," << (s.pass ? 1 : 0) << "\n";
        }
    }
    return report.all_pass ? 0 : 1;
}

int cmd_bench(const BenchOptions& options) {
    if (options.dataset.empty()) {
        std::cerr << "bench: --dataset is required\n";
        return 2;
    }
    const Dataset data = read_dataset(options.dataset);

    std::vector<double> query_rows;
    std::size_t n_queries = 0;
    if (!options.queries.empty()) {
        const Dataset q = read_dataset(options.queries);
        if (q.d != data.d) {
            std::cerr << "bench: query dimension mismatch\n";
            return 1;
        }
        query_rows = q.points;
        n_queries = q.n;
    } else {
        MixtureConfig config;
        config.n = data.n;
        config.d = data.d;
        config.delta_bound = data.delta_bound;
        config.sigma = data.sigma;
        config.seed = options.seed;
        n_queries = std::max<std::size_t>(options.timed_queries, 1);
        query_rows = sample_queries(config, n_queries);
    }

    std::vector<BenchRow> rows;
    for (const std::string& method_name_str : options.methods) {
        for (double eps : options.epsilons) {
            SketchConfig config;
            config.method = method_from_name(method_name_str);
            config.epsilon = eps;
            config.delta = options.delta;
            config.seed = options.seed;
            config.consts = options.consts;
            config.rff_features = options.rff_features;

            BenchRow row;
            row.method = method_name_str;
            row.d = data.d;
            row.n = data.n;
            row.sigma = data.sigma;
            row.delta_bound = data.delta_bound;
            row.epsilon = eps;

            const auto build_start = Clock::now();
            const KdeSketch sketch = build_sketch(data, config);
            row.build_ms = ms_since(build_start);

            auto query_at = [&](std::size_t i) {
                return std::span<const double>(query_rows.data() + (i % n_queries) * data.d,
                                               data.d);
            };
            for (std::size_t i = 0; i < options.warmup; ++i) (void)query(sketch, query_at(i));

            std::vector<double> times_us;
            times_us.reserve(options.timed_queries);
            for (std::size_t i = 0; i < options.timed_queries; ++i) {
                const auto t0 = Clock::now();
                (void)query(sketch, query_at(i));
                times_us.push_back(
                    std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
            }
            double sum = 0.0;
            for (double t : times_us) sum += t;
            row.query_us_mean = sum / static_cast<double>(times_us.size());
            std::sort(times_us.begin(), times_us.end());
            row.query_us_p99 =
                times_us[std::min(times_us.size() - 1,
                                  static_cast<std::size_t>(0.99 * static_cast<double>(times_us.size())))];

            const std::size_t n_err = std::min(options.error_queries, n_queries);
            std::vector<double> errs(n_err);
            for (std::size_t i = 0; i < n_err; ++i) {
                const double exact = exact_kde(data, query_at(i), Kernel::gaussian());
                errs[i] = std::fabs(query(sketch, query_at(i)) - exact);
            }
            double esum = 0.0;
            for (double e : errs) esum += e;
            row.err_mean = esum / static_cast<double>(n_err);
            std::sort(errs.begin(), errs.end());
            row.err_p95 = errs[std::min(n_err - 1, static_cast<std::size_t>(0.95 * static_cast<double>(n_err)))];
            row.err_max = errs.back();
            rows.push_back(std::move(row));
        }
    }

    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return a.method != b.method ? a.method < b.method : a.epsilon < b.epsilon;
    });

    std::ofstream out_file;
    std::ostream& out = open_output(out_file, options.out);
    if (options.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) {
            j.push_back({{"method", r.method},
                         {"d", r.d},
                         {"n", r.n},
                         {"sigma", r.sigma},
                         {"delta_bound", r.delta_bound},
                         {"epsilon", r.epsilon},
                         {"build_ms", r.build_ms},
                         {"query_us_mean", r.query_us_mean},
                         {"query_us_p99", r.query_us_p99},
                         {"err_mean", r.err_mean},
                         {"err_p95", r.err_p95},
                         {"err_max", r.err_max},
                         {"seeds_used", r.seeds_used}});
        }
        out << j.dump(2) << "\n";
    } else {
        out << "method,d,n,sigma,delta_bound,epsilon,build_ms,query_us_mean,query_us_p99,"
               "err_mean,err_p95,err_max,seeds_used\n";
        for (const auto& r : rows) {
            out << r.method << "," << r.d << "," << r.n << "," << fmt_g17(r.sigma) << ","
                << fmt_g17(r.delta_bound) << "," << fmt_g17(r.epsilon) << ","
                << fmt_g17(r.build_ms) << "," << fmt_g17(r.query_us_mean) << ","
                << fmt_g17(r.query_us_p99) << "," << fmt_g17(r.err_mean) << ","
                << fmt_g17(r.err_p95) << "," << fmt_g17(r.err_max) << "," << r.seeds_used << "\n";
        }
    }
    return 0;
}

int cmd_selftest() {
    std::size_t failures = 0;
    auto check = [&](bool ok, const char* name) {
        std::printf("%s  %s\n", ok ? "ok  " : "FAIL", name);
        if (!ok) ++failures;
    };

    {
        std::vector<double> v = {1, 0, 0, 0};
        fwht(v);
        check(std::fabs(v[0] - 0.5) < 1e-15 && std::fabs(v[3] - 0.5) < 1e-15, "fwht basis vector");
    }
    {
        std::vector<double> v = {3, -1, 2, 0};
        fwht(v);
        fwht(v);
        check(std::fabs(v[0] - 3) < 1e-12 && std::fabs(v[1] + 1) < 1e-12, "fwht involution");
    }
    {
        RandomStream a(7, "B1"), b(7, "B1"), c(8, "B1");
        const auto x = a.next_u64();
        check(x == b.next_u64() && x != c.next_u64(), "stream determinism");
    }
    {
        std::vector<double> v(257);
        RandomStream rs(3, "t");
        for (auto& x : v) x = 10.0 * rs.normal();
        const auto p = psi(v);
        double norm = 0.0;
        for (double x : p) norm += x * x;
        check(std::fabs(norm - 1.0) < 1e-12, "psi unit norm");
    }
    {
        Dataset data;
        data.n = 2;
        data.d = 3;
        data.sigma = 1.0;
        data.delta_bound = 2.0;
        data.points = {0, 0, 0, 1, 0, 0};
        const double v = exact_kde(data, std::vector<double>{0, 0, 0}, Kernel::gaussian());
        check(std::fabs(v - (1.0 + std::exp(-1.0)) / 2.0) < 1e-15, "exact kde oracle");
    }
    {
        MixtureConfig mc;
        mc.n = 64;
        mc.d = 8;
        mc.delta_bound = 4.0;
        mc.seed = 5;
        const Dataset data = make_gaussian_mixture(mc);
        SketchConfig config;
        config.epsilon = 0.25;
        config.delta = 0.2;
        config.seed = 11;
        config.consts.log_exponent = 0;
        const KdeSketch s1 = build_sketch(data, config);
        set_default_threads(1);
        const KdeSketch s2 = build_sketch(data, config);
        set_default_threads(0);
        check(s1.mean_features == s2.mean_features, "build determinism across thread counts");
        const double q = query(s1, data.point(0));
        check(q > 0.0 && q <= 1.0 + 1e-9, "query in range");
    }
    check(coreset_size(0.1, 0.1) == 150, "coreset size arithmetic");

    std::printf("%s (%zu failure%s)\n", failures == 0 ? "selftest passed" : "selftest FAILED",
                failures, failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}

}  // namespace kdesketch::cli
