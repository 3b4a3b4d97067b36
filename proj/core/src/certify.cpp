#include "kdesketch/certify.hpp"

#include <cmath>
#include <stdexcept>

#include "kdesketch/hadamard.hpp"
#include "kdesketch/rng.hpp"
#include "kdesketch/threading.hpp"
#include "kdesketch/transforms.hpp"
#include "kdesketch/trig.hpp"

namespace kdesketch {

namespace {

enum class SuiteKind { Expansion, Contraction, Collapse, QConcentration };

struct TrialStats {
    double dist_sq = 0.0;
    double q = 0.0;
};

// One fresh inner-stage draw; distance via the exact identity
// ||Phi(x)-Phi(y)||^2 = (2/m) sum (1 - cos((Vz)_j)).
TrialStats run_trial(std::span<const double> z, std::size_t m, std::uint64_t trial_seed,
                     bool full_variant, std::vector<double>& buf_v,
                     std::vector<double>& buf_cos) {
    const FastfoodOperator op = make_fastfood(trial_seed, "1", m, full_variant);
    for (std::size_t i = 0; i < z.size(); ++i) buf_v[i] = z[i];
    for (std::size_t i = z.size(); i < m; ++i) buf_v[i] = 0.0;
    op.apply(std::span<double>(buf_v.data(), m), std::span<double>(buf_cos.data(), m));

    TrialStats st;
    for (std::size_t i = 0; i < m; ++i) st.q += buf_v[i] * buf_v[i];
    st.q /= static_cast<double>(m);
    cos_batch(std::span<const double>(buf_v.data(), m), std::span<double>(buf_cos.data(), m));
    double one_minus = 0.0;
    for (std::size_t i = 0; i < m; ++i) one_minus += 1.0 - buf_cos[i];
    st.dist_sq = 2.0 * one_minus / static_cast<double>(m);
    return st;
}

}  // namespace

const SuiteResult* CertifyReport::suite(const std::string& name) const {
    for (const auto& s : suites) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

CertifyReport certify_embedding(const CertifyConfig& config) {
    if (config.trials < 100) throw std::invalid_argument("certify: trials must be >= 100");

    EmbeddingParams params = EmbeddingParams::for_embedding(
        config.d, config.epsilon, config.eta, config.lambda, config.seed, config.consts);
    if (config.force_m > 0) params.m = next_pow2(config.force_m);
    const std::size_t m = params.m;
    const std::size_t d_eff = std::min(config.d, m);
    const double eps = params.epsilon;
    const double eta = params.eta;
    const double lam_sq = params.lambda * params.lambda;

    CertifyReport report;
    report.d = d_eff;
    report.m = m;
    report.epsilon = eps;
    report.eta = eta;
    report.lambda = params.lambda;

    struct Suite {
        SuiteKind kind;
        std::string name;
        std::vector<double> norms_sq;
        double threshold;
    };
    // Collapse is only claimed on (eps, Lambda^2]; drop magnitudes outside it.
    std::vector<double> collapse_norms;
    for (double ns : {2.0 * eps, 1.0, lam_sq / 2.0, lam_sq}) {
        if (ns > eps && ns <= lam_sq) collapse_norms.push_back(ns);
    }
    if (collapse_norms.empty()) collapse_norms.push_back(lam_sq);

    const std::vector<Suite> suites = {
        {SuiteKind::Expansion, "expansion",
         {0.01, 0.1, 1.0, lam_sq / 2.0}, std::max(2.0 * eta, 0.02)},
        {SuiteKind::Contraction, "contraction",
         {eps / 10.0, eps / 2.0, eps}, std::max(3.0 * eta, 0.02)},
        {SuiteKind::Collapse, "collapse", collapse_norms, std::max(2.0 * eta, 0.02)},
        {SuiteKind::QConcentration, "q-concentration", {1.0}, std::max(eta, 0.02)},
    };

    bool all_pass = true;
    for (std::size_t si = 0; si < suites.size(); ++si) {
        const Suite& suite = suites[si];
        // Fixed pair directions, one per tested magnitude.
        RandomStream zs(config.seed, "pair");
        std::vector<std::vector<double>> zvecs;
        for (double ns : suite.norms_sq) {
            std::vector<double> z(d_eff);
            double norm_sq = 0.0;
            for (auto& v : z) {
                v = zs.normal();
                norm_sq += v * v;
            }
            const double scale = std::sqrt(ns / norm_sq);
            for (auto& v : z) v *= scale;
            zvecs.push_back(std::move(z));
        }

        std::vector<char> violated(config.trials, 0);
        parallel_for(config.trials, [&](std::size_t t) {
            thread_local std::vector<double> buf_v, buf_cos;
            if (buf_v.size() < m) {
                buf_v.resize(m);
                buf_cos.resize(m);
            }
            const std::size_t which = t % zvecs.size();
            const double norm_sq = suite.norms_sq[which];
            const std::uint64_t trial_seed =
                derive_seed(config.seed, (si << 32) ^ t);
            const TrialStats st =
                run_trial(zvecs[which], m, trial_seed, config.consts.full_fastfood, buf_v, buf_cos);
            bool bad = false;
            switch (suite.kind) {
                case SuiteKind::Expansion:
                    bad = st.dist_sq > (1.0 + eps) * norm_sq;
                    break;
                case SuiteKind::Contraction:
                    bad = st.dist_sq < (1.0 - eps) * norm_sq;
                    break;
                case SuiteKind::Collapse:
                    bad = st.dist_sq < eps / 4.0;
                    break;
                case SuiteKind::QConcentration:
                    bad = st.q < (1.0 - eps) * norm_sq || st.q > (1.0 + eps) * norm_sq;
                    break;
            }
            violated[t] = bad ? 1 : 0;
        });

        SuiteResult res;
        res.name = suite.name;
        res.trials = config.trials;
        for (char c : violated) res.violations += c;
        res.rate = static_cast<double>(res.violations) / static_cast<double>(config.trials);
        res.threshold = suite.threshold;
        res.pass = res.rate <= res.threshold;
        all_pass = all_pass && res.pass;
        report.suites.push_back(std::move(res));
    }
    report.all_pass = all_pass;
    return report;
}

}  // namespace kdesketch
