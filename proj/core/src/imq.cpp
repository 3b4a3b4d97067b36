#include "kdesketch/imq.hpp"

#include <cmath>
#include <string>

#include "kdesketch/rng.hpp"

namespace kdesketch {

namespace {

// ln of the r-domain term value at r: h * e^{beta h l} * e^{-e^{h l} r} / Gamma(beta),
// with e^{h l} = lambda_l / zeta. Everything in log space; huge l underflow to 0.
double term_log(double log_h_over_gamma, double beta_h, double l, double lam_over_zeta,
                double r) {
    return log_h_over_gamma + beta_h * l - lam_over_zeta * r;
}

struct Grid {
    std::vector<double> r;
    std::vector<double> exact;  // r^{-beta}
};

Grid make_grid(double beta, double zeta, std::size_t points) {
    Grid g;
    g.r.resize(points);
    g.exact.resize(points);
    const double log_zeta = std::log(zeta);
    for (std::size_t j = 0; j < points; ++j) {
        const double f = points == 1 ? 0.0
                                     : static_cast<double>(j) / static_cast<double>(points - 1);
        // Geometric from zeta to 1.
        g.r[j] = std::exp(log_zeta * (1.0 - f));
        g.exact[j] = std::pow(g.r[j], -beta);
    }
    g.r.front() = zeta;
    g.r.back() = 1.0;
    return g;
}

// Max relative grid error of the truncated trapezoid sum over l in (M, N].
double grid_error(const Grid& grid, double beta, double h, std::int64_t M,
                  std::int64_t N, double* err_low_r = nullptr, double* err_high_r = nullptr) {
    const double log_h_over_gamma = std::log(h) - std::lgamma(beta);
    const double beta_h = beta * h;
    double worst = 0.0, worst_low = 0.0, worst_high = 0.0;
    for (std::size_t j = 0; j < grid.r.size(); ++j) {
        const double r = grid.r[j];
        double sum = 0.0;
        for (std::int64_t l = N; l > M; --l) {
            const double lam_over_zeta = std::exp(h * static_cast<double>(l));
            const double lt = term_log(log_h_over_gamma, beta_h, static_cast<double>(l),
                                       lam_over_zeta, r);
            if (lt < -745.0) {
                // Terms decay monotonically in both tail directions; once the
                // upper side underflows, continue until the peak passes.
                if (lam_over_zeta * r > beta) continue;
                break;
            }
            sum += std::exp(lt);
        }
        const double rel = std::fabs(grid.exact[j] - sum) / grid.exact[j];
        worst = std::max(worst, rel);
        if (j < grid.r.size() / 2) {
            worst_low = std::max(worst_low, rel);
        } else {
            worst_high = std::max(worst_high, rel);
        }
    }
    if (err_low_r) *err_low_r = worst_low;
    if (err_high_r) *err_high_r = worst_high;
    return worst;
}

}  // namespace

double ExpSumApprox::alpha_sum() const {
    double acc = 0.0;
    for (double a : alphas) acc += a;
    return acc;
}

double ExpSumApprox::lambda_sum() const {
    double acc = 0.0;
    for (double l : lambdas) acc += l;
    return acc;
}

double ExpSumApprox::eval_kernel(double dist_sq) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        acc += alphas[i] * std::exp(-lambdas[i] * dist_sq);
    }
    return acc;
}

double ExpSumApprox::eval_power(double r) const {
    // r = zeta (1 + t)  =>  approx(r) = zeta^{-beta} * eval_kernel(t).
    const double t = r / zeta - 1.0;
    return std::pow(zeta, -beta) * eval_kernel(t);
}

double ExpSumApprox::max_rel_error(std::size_t grid_points) const {
    const Grid grid = make_grid(beta, zeta, grid_points);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.r.size(); ++j) {
        const double approx = eval_power(grid.r[j]);
        worst = std::max(worst, std::fabs(grid.exact[j] - approx) / grid.exact[j]);
    }
    return worst;
}

ExpSumApprox build_exp_sum(double beta, double zeta, double epsilon,
                           const ExpSumOptions& options) {
    if (!(beta >= options.beta_min && beta <= options.beta_max)) {
        throw std::invalid_argument("build_exp_sum: beta outside [" +
                                    std::to_string(options.beta_min) + ", " +
                                    std::to_string(options.beta_max) + "]");
    }
    if (!(zeta > 0.0 && zeta <= 1.0)) throw std::invalid_argument("build_exp_sum: zeta in (0,1]");
    if (!(epsilon > 0.0 && epsilon <= 1.0 / std::exp(1.0))) {
        throw std::invalid_argument("build_exp_sum: epsilon must be in (0, 1/e]");
    }

    const double log_inv_eps = std::log(1.0 / epsilon);
    const double h = options.kappa / (beta + log_inv_eps);
    const double t_star =
        std::log(beta) + std::log(1.0 / zeta) + std::log(log_inv_eps) + options.kappa2;

    std::int64_t N = static_cast<std::int64_t>(std::ceil((h + t_star) / h));
    // Lower truncation from the geometric tail bound sum_{l<=M} ~ e^{beta h M}/(beta Gamma(beta)).
    const double log_tail_target =
        std::log(epsilon / 2.0) + std::log(beta) + std::lgamma(beta);
    std::int64_t M = static_cast<std::int64_t>(std::floor(log_tail_target / (beta * h))) - 2;
    if (M >= N) M = N - 1;

    const Grid grid = make_grid(beta, zeta, options.grid_points);
    double err = 0.0, err_low = 0.0, err_high = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        err = grid_error(grid, beta, h, M, N, &err_low, &err_high);
        if (err <= epsilon) break;
        if (static_cast<std::size_t>(N - M) > options.max_terms) break;
        // Error near r = zeta is dominated by the upper cutoff N, near r = 1
        // by the lower cutoff M.
        const std::int64_t step = std::max<std::int64_t>(8, (N - M) / 10);
        if (err_low >= err_high) {
            N += step;
        } else {
            M -= step;
        }
    }
    if (err > epsilon) {
        throw ApproximationFailure(
            "build_exp_sum: grid relative error " + std::to_string(err) +
                " exceeds requested " + std::to_string(epsilon) + " after scan limits",
            err);
    }

    ExpSumApprox out;
    out.beta = beta;
    out.zeta = zeta;
    out.h = h;
    out.epsilon = epsilon;

    // alpha_l = zeta^beta h e^{beta h l - lambda_l} / Gamma(beta), in log space.
    const double log_alpha_base =
        beta * std::log(zeta) + std::log(h) - std::lgamma(beta);
    std::vector<double> alphas, lambdas;
    std::int64_t first_kept = 0;
    bool any = false;
    for (std::int64_t l = M + 1; l <= N; ++l) {
        const double lambda = zeta * std::exp(h * static_cast<double>(l));
        const double log_alpha = log_alpha_base + beta * h * static_cast<double>(l) - lambda;
        const double alpha = std::exp(log_alpha);
        if (alpha < 1e-300) continue;  // trim exact/subnormal underflow at both tails
        if (!any) {
            first_kept = l;
            any = true;
        }
        alphas.push_back(alpha);
        lambdas.push_back(lambda);
    }
    if (!any) {
        throw ApproximationFailure("build_exp_sum: all coefficients underflowed", 1.0);
    }
    out.M = first_kept - 1;
    out.N = out.M + static_cast<std::int64_t>(alphas.size());
    out.alphas = std::move(alphas);
    out.lambdas = std::move(lambdas);

    const double asum = out.alpha_sum();
    if (asum > 1.0 + epsilon) {
        throw ApproximationFailure(
            "build_exp_sum: sum of alphas " + std::to_string(asum) + " exceeds 1 + epsilon",
            asum - 1.0);
    }
    return out;
}

ImqSketch imq_build(const Dataset& data, double beta, double epsilon, double delta,
                    std::uint64_t seed, Method bank_method,
                    const EmbeddingConstants& consts, const ExpSumOptions& options) {
    if (data.n == 0) throw std::invalid_argument("imq_build: empty dataset");
    const double delta_sigma = data.effective_diameter();
    const double zeta = 1.0 / (1.0 + delta_sigma * delta_sigma);

    ImqSketch sketch;
    sketch.approx = build_exp_sum(beta, zeta, epsilon, options);
    sketch.beta = beta;
    sketch.epsilon = epsilon;
    sketch.delta = delta;
    sketch.seed = seed;
    sketch.n_points = data.n;
    sketch.d = data.d;
    sketch.sigma = data.sigma;
    sketch.delta_bound = data.delta_bound;
    sketch.bank_method = bank_method;
    sketch.consts = consts;
    sketch.delta_prime = delta / static_cast<double>(sketch.approx.terms());

    sketch.bank.reserve(sketch.approx.terms());
    for (std::size_t i = 0; i < sketch.approx.terms(); ++i) {
        SketchConfig cfg;
        cfg.method = bank_method;
        cfg.epsilon = epsilon;
        cfg.delta = sketch.delta_prime;
        cfg.seed = derive_seed(seed, i);
        cfg.consts = consts;
        // Bandwidth 1/sqrt(lambda_l) relative to sigma: points scaled up by sqrt(lambda_l).
        cfg.sigma_override = data.sigma / std::sqrt(sketch.approx.lambdas[i]);
        sketch.bank.push_back(build_sketch(data, cfg));
    }
    return sketch;
}

double imq_query(const ImqSketch& sketch, std::span<const double> y) {
    if (y.size() != sketch.d) throw std::invalid_argument("imq_query: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < sketch.bank.size(); ++i) {
        acc += sketch.approx.alphas[i] * query(sketch.bank[i], y);
    }
    return acc;
}

}  // namespace kdesketch
