#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kdesketch/kde.hpp"

namespace kdesketch {

// Thrown when the scan-and-validate construction cannot reach the requested
// relative accuracy; carries the error that was achieved.
class ApproximationFailure : public std::runtime_error {
public:
    ApproximationFailure(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

struct ExpSumOptions {
    double kappa = 0.5;   // h = kappa / (beta + ln(1/eps))
    double kappa2 = 3.0;  // additive constant in the upper cutoff t*
    std::size_t grid_points = 1000;
    double beta_min = 0.05;
    double beta_max = 64.0;
    std::size_t max_terms = 200000;
};

// Positive coefficients {(alpha_l, lambda_l)} with lambda_l = zeta e^{h l},
// approximating r^{-beta} on [zeta, 1]:
//   | r^{-beta} - sum_l (alpha_l / zeta^beta) e^{-lambda_l (r/zeta - 1)} |
//     <= r^{-beta} * epsilon,
// equivalently  (1 + t)^{-beta} ~ sum_l alpha_l e^{-lambda_l t}  for the
// squared-distance variable t = r/zeta - 1 in [0, Delta_sigma^2].
struct ExpSumApprox {
    double beta = 1.0;
    double zeta = 1.0;
    double h = 0.0;
    double epsilon = 0.0;
    std::int64_t M = 0;  // terms l = M+1 .. N (after trimming)
    std::int64_t N = 0;
    std::vector<double> alphas;
    std::vector<double> lambdas;

    std::size_t terms() const { return alphas.size(); }
    double alpha_sum() const;
    double lambda_sum() const;

    // sum_l alpha_l exp(-lambda_l * dist_sq): the IMQ kernel surrogate.
    double eval_kernel(double dist_sq) const;
    // Approximation of r^{-beta} on [zeta, 1].
    double eval_power(double r) const;
    // max over a geometric grid on [zeta, 1] of |r^-b - approx| / r^-b.
    double max_rel_error(std::size_t grid_points = 1000) const;
};

// Trapezoid discretization of r^{-beta} = (1/Gamma(beta)) int e^{beta t - e^t r} dt
// with scan-and-validate selection of h, M, N.
ExpSumApprox build_exp_sum(double beta, double zeta, double epsilon,
                           const ExpSumOptions& options = {});

// Bank of Gaussian sketches, one per exp-sum term, bandwidths sigma/sqrt(lambda_l).
struct ImqSketch {
    ExpSumApprox approx;
    std::vector<KdeSketch> bank;
    double beta = 1.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double delta_prime = 0.0;  // per-bank failure budget delta / (N - M)
    std::uint64_t seed = 0;
    std::size_t n_points = 0;
    std::size_t d = 0;
    double sigma = 1.0;
    double delta_bound = 0.0;
    Method bank_method = Method::OURS;
    EmbeddingConstants consts;
};

ImqSketch imq_build(const Dataset& data, double beta, double epsilon, double delta,
                    std::uint64_t seed, Method bank_method = Method::OURS,
                    const EmbeddingConstants& consts = {},
                    const ExpSumOptions& options = {});

// sum_l alpha_l * query(bank_l, y), combined in fixed l order.
double imq_query(const ImqSketch& sketch, std::span<const double> y);

}  // namespace kdesketch
