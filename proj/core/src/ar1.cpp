#include "betacov/ar1.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "betacov/conformal.hpp"
#include "betacov/error.hpp"
#include "betacov/numerics.hpp"
#include "betacov/parallel.hpp"

namespace betacov {

void Ar1Config::validate() const {
    if (!(std::fabs(a) < 1.0)) throw DomainError("Ar1Config: |a| must be < 1");
    if (n < 2) throw DomainError("Ar1Config: n must be >= 2");
    if (ell < 1) throw DomainError("Ar1Config: ell must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("Ar1Config: gamma must lie in (0,1)");
    if (sims < 1) throw DomainError("Ar1Config: sims must be >= 1");
}

long Ar1Config::k() const { return conformal_index(n, gamma); }

std::vector<double> simulate_ar1(const Ar1Config& config, std::uint64_t replication) {
    config.validate();
    UniformStream rng(make_stream(config.master_seed, "ar1", replication));
    const double innovation_sd = std::sqrt(1.0 - config.a * config.a);
    std::vector<double> path(static_cast<std::size_t>(config.n));
    path[0] = rng.next_normal();
    for (std::size_t i = 1; i < path.size(); ++i) {
        path[i] = config.a * path[i - 1] + innovation_sd * rng.next_normal();
    }
    return path;
}

double realized_coverage_ar1(double order_statistic, double last_score, double a, long ell) {
    if (!(std::fabs(a) < 1.0)) throw DomainError("realized_coverage_ar1: |a| must be < 1");
    if (ell < 1) throw DomainError("realized_coverage_ar1: ell must be >= 1");
    const double carry = std::pow(a, static_cast<double>(ell));
    const double residual_var = 1.0 - carry * carry;
    if (!(residual_var > 0.0)) throw IdentityViolation("realized_coverage_ar1: a^(2 ell) >= 1");
    return std_normal_cdf((order_statistic - carry * last_score) / std::sqrt(residual_var));
}

std::vector<double> simulate_realized_coverage(const Ar1Config& config, int workers, TestCoupling coupling) {
    config.validate();
    const long k = config.k();
    if (k > config.n) {
        throw DegenerateCoverage("AR(1): k_gamma exceeds n; realized coverage is identically 1", config.n, k);
    }
    const auto count = static_cast<std::size_t>(config.sims);
    std::vector<double> coverage(count);
    parallel_for(count, workers, [&](std::size_t rep) {
        std::vector<double> path = simulate_ar1(config, rep);
        const double last = path.back();
        auto kth = path.begin() + (k - 1);
        std::nth_element(path.begin(), kth, path.end());
        coverage[rep] = coupling == TestCoupling::markov ? realized_coverage_ar1(*kth, last, config.a, config.ell)
                                                         : std_normal_cdf(*kth);
    });
    return coverage;
}

std::shared_ptr<const EmpiricalLaw> mc_coverage_law(const Ar1Config& config, int workers, TestCoupling coupling) {
    return empirical_from_samples(simulate_realized_coverage(config, workers, coupling),
                                  make_stream(config.master_seed, "ar1", 0));
}

double long_run_sd(double gamma, double a, double truncation_tol) {
    if (!(std::fabs(a) < 1.0)) throw DomainError("long_run_sd: |a| must be < 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("long_run_sd: gamma must lie in (0,1)");
    if (!(truncation_tol > 0.0)) throw DomainError("long_run_sd: truncation_tol must be > 0");

    // Gaussian copula: U_j = Phi(T_j) with corr(T_0, T_j) = a^j, so
    // Cov(1{U_0 <= gamma}, 1{U_j <= gamma}) = Phi2(z, z; a^j) - gamma^2.
    // Each term is at most asin|a^j| / (2 pi) <= |a|^j / 4, which bounds the tail.
    const double z = std_normal_quantile(gamma);
    const double abs_a = std::fabs(a);
    double tau2 = gamma * (1.0 - gamma);
    double rho = a;
    double remaining = abs_a / (4.0 * (1.0 - abs_a));
    while (remaining >= truncation_tol) {
        tau2 += 2.0 * bivariate_normal_excess(z, z, rho);
        rho *= a;
        remaining *= abs_a;
    }
    if (!(tau2 > 0.0)) throw IdentityViolation("long_run_sd: non-positive long-run variance");
    return std::sqrt(tau2);
}

BerryEsseenRadius berry_esseen_radius(long n, double gamma, double a, long ell) {
    if (n < 1) throw DomainError("berry_esseen_radius: n must be >= 1");
    if (ell < 1) throw DomainError("berry_esseen_radius: ell must be >= 1");
    BerryEsseenRadius radius;
    radius.delta_term = std::pow(std::fabs(a), static_cast<double>(ell));
    const double tau = long_run_sd(gamma, a);
    radius.floor_term =
        std::sqrt(2.0 / (std::numbers::pi * static_cast<double>(n))) * std::fabs(tau - std::sqrt(gamma * (1.0 - gamma)));
    return radius;
}

McEstimate batched_w1(std::span<const double> sample, const UnitLaw& reference, int batches) {
    if (sample.empty()) throw DomainError("batched_w1: empty sample");
    const auto full = empirical_from_samples(std::vector<double>(sample.begin(), sample.end()));
    McEstimate out{w1_empirical(*full, reference).distance, 0.0};
    const auto count = sample.size();
    if (batches < 2 || count < static_cast<std::size_t>(batches)) return out;

    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(batches));
    for (int b = 0; b < batches; ++b) {
        const std::size_t begin = count * static_cast<std::size_t>(b) / static_cast<std::size_t>(batches);
        const std::size_t end = count * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(batches);
        const auto part = empirical_from_samples(std::vector<double>(sample.begin() + begin, sample.begin() + end));
        estimates.push_back(w1_empirical(*part, reference).distance);
    }
    const double m = std::accumulate(estimates.begin(), estimates.end(), 0.0) / batches;
    double ss = 0.0;
    for (const double e : estimates) ss += (e - m) * (e - m);
    out.standard_error = std::sqrt(ss / (batches - 1)) / std::sqrt(static_cast<double>(batches));
    return out;
}

BoundChainRow bound_chain_from_sample(const Ar1Config& config, std::span<const double> sample) {
    config.validate();
    BoundChainRow row;
    row.config = config;
    row.k = config.k();
    const auto reference = beta_reference(config.n, row.k);
    const auto law = empirical_from_samples(std::vector<double>(sample.begin(), sample.end()));

    row.mc_mean = law->mean();
    row.mc_gap = std::fabs(row.mc_mean - reference->mean());
    row.mc_gap_se = law->standard_error_of_mean();
    const McEstimate distance = batched_w1(sample, *reference);
    row.mc_w1 = distance.value;
    row.mc_w1_se = distance.standard_error;
    row.radius = berry_esseen_radius(config.n, config.gamma, config.a, config.ell);
    row.analytic_bound = row.radius.total();
    row.combined_se = std::hypot(row.mc_gap_se, row.mc_w1_se);
    row.chain_holds = row.mc_gap <= row.mc_w1 + 3.0 * row.combined_se;
    return row;
}

BoundChainRow bound_chain(const Ar1Config& config, int workers) {
    const std::vector<double> sample = simulate_realized_coverage(config, workers);
    return bound_chain_from_sample(config, sample);
}

BadCalibrationRow bad_calibration_from_sample(const Ar1Config& config, double eta,
                                              std::span<const double> sample, const McEstimate& distance) {
    config.validate();
    if (!(eta > 0.0 && eta < config.gamma)) throw DomainError("bad_calibration_report: eta must lie in (0, gamma)");
    if (sample.empty()) throw DomainError("bad_calibration_report: empty sample");

    BadCalibrationRow row;
    row.config = config;
    row.k = config.k();
    row.eta = eta;
    row.threshold = config.gamma - eta;
    const auto hits = std::count_if(sample.begin(), sample.end(), [&](double d) { return d <= row.threshold; });
    const double total = static_cast<double>(sample.size());
    row.mc_tail = static_cast<double>(hits) / total;
    row.mc_tail_se = std::sqrt(row.mc_tail * (1.0 - row.mc_tail) / total);
    row.beta_tail = iid_bad_calibration(config.n, row.k, config.gamma - 0.5 * eta);
    row.mc_w1 = distance.value;
    row.mc_w1_se = distance.standard_error;
    row.bound_raw = row.beta_tail + 2.0 * row.mc_w1 / eta;
    row.bound = std::min(1.0, row.bound_raw);
    row.combined_se = std::hypot(row.mc_tail_se, 2.0 * row.mc_w1_se / eta);
    row.holds = row.mc_tail <= row.bound_raw + 3.0 * row.combined_se;
    return row;
}

BadCalibrationRow bad_calibration_report(const Ar1Config& config, double eta, int workers) {
    const std::vector<double> sample = simulate_realized_coverage(config, workers);
    const auto reference = beta_reference(config.n, config.k());
    return bad_calibration_from_sample(config, eta, sample, batched_w1(sample, *reference));
}

} // namespace betacov
