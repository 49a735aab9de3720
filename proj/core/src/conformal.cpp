#include "betacov/conformal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "betacov/error.hpp"
#include "betacov/numerics.hpp"
#include "betacov/parallel.hpp"
#include "betacov/transport.hpp"

namespace betacov {

namespace {

__extension__ typedef __int128 wide_int;

// Exact decimal value of the shortest round-trip representation of x in
// (0,1), as numerator / 10^exponent.
std::pair<wide_int, wide_int> decimal_fraction(double x) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, x, std::chars_format::scientific);
    if (ec != std::errc{}) throw DomainError("conformal_index: cannot format gamma");
    const std::string text(buffer, end);   // d.ddddde-XX
    const auto e_pos = text.find('e');
    const std::string mantissa = text.substr(0, e_pos);
    const int exponent = std::stoi(text.substr(e_pos + 1));

    wide_int numerator = 0;
    int fraction_digits = 0;
    bool after_point = false;
    for (const char c : mantissa) {
        if (c == '.') {
            after_point = true;
            continue;
        }
        numerator = numerator * 10 + (c - '0');
        if (after_point) ++fraction_digits;
    }
    // value = numerator * 10^(exponent - fraction_digits)
    int scale = fraction_digits - exponent;
    wide_int denominator = 1;
    while (scale > 0) {
        denominator *= 10;
        --scale;
    }
    while (scale < 0) {
        numerator *= 10;
        ++scale;
    }
    return {numerator, denominator};
}

void require_index(long n, long k) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (k < 1 || k > n) throw DomainError("k must satisfy 1 <= k <= n");
}

} // namespace

long conformal_index(long n, double gamma) {
    if (n < 1) throw DomainError("conformal_index: n must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("conformal_index: gamma must lie in (0,1)");
    const auto [num, den] = decimal_fraction(gamma);
    const wide_int product = static_cast<wide_int>(n + 1) * num;
    return static_cast<long>((product + den - 1) / den);
}

ConformalConfig ConformalConfig::derived(long n, double gamma) { return {n, gamma, conformal_index(n, gamma)}; }

ConformalConfig ConformalConfig::explicit_index(long n, long k, double gamma) {
    if (n < 1 || k < 1) throw DomainError("ConformalConfig: n and k must be >= 1");
    return {n, gamma, k};
}

CoverageBand marginal_coverage_band(long n, double gamma) {
    const long k = conformal_index(n, gamma);
    if (k > n) {
        throw DegenerateCoverage("k_gamma = " + std::to_string(k) + " exceeds n = " + std::to_string(n) +
                                     "; the threshold is +infinity and coverage is exactly 1",
                                 n, k);
    }
    return {static_cast<double>(k) / static_cast<double>(n + 1), gamma, gamma + 1.0 / static_cast<double>(n + 1)};
}

double iid_bad_calibration(long n, long k, double t) {
    require_index(n, k);
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("iid_bad_calibration: t must lie in [0,1]");
    return regularized_incomplete_beta(t, static_cast<double>(k), static_cast<double>(n + 1 - k));
}

double binomial_upper_tail(long n, long k, double t) {
    if (n < 0) throw DomainError("binomial_upper_tail: n must be >= 0");
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    return regularized_incomplete_beta(std::clamp(t, 0.0, 1.0), static_cast<double>(k),
                                       static_cast<double>(n - k + 1));
}

CoverageGapReport coverage_gap_report(const UnitLaw& nu, const ConformalConfig& config, const QuadratureSpec& spec) {
    const auto reference = beta_reference(config.n, config.k);
    const W1Result distance = w1(nu, *reference, spec);

    CoverageGapReport report;
    report.reference_mean = reference->mean();
    report.w1_radius = distance.distance;
    report.gap_bound = distance.distance;
    report.nominal_gap_bound = distance.distance + 1.0 / static_cast<double>(config.n + 1);
    report.realized_gap = std::fabs(nu.mean() - report.reference_mean);
    report.achieved_tolerance = distance.achieved_tolerance;
    if (report.realized_gap > report.w1_radius + 1e-7) {
        throw IdentityViolation("coverage gap " + std::to_string(report.realized_gap) + " exceeds W1 radius " +
                                std::to_string(report.w1_radius));
    }
    return report;
}

std::string_view to_string(BoundVariant variant) noexcept {
    return variant == BoundVariant::markov ? "markov" : "uniform-shift";
}

BadCalibrationBound bad_calibration_markov(double rho, double p, double t, double epsilon, long n, long k) {
    require_index(n, k);
    if (!(epsilon > 0.0)) throw DomainError("bad_calibration_markov: epsilon must be > 0");
    if (!(rho >= 0.0)) throw DomainError("bad_calibration_markov: rho must be >= 0");
    if (!(p >= 1.0)) throw DomainError("bad_calibration_markov: p must be >= 1");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("bad_calibration_markov: t must lie in [0,1]");

    BadCalibrationBound bound;
    bound.t = t;
    bound.epsilon = epsilon;
    bound.beta_tail = iid_bad_calibration(n, k, std::min(1.0, t + epsilon));
    bound.penalty = std::pow(rho / epsilon, p);
    bound.raw_total = bound.beta_tail + bound.penalty;
    bound.total = std::min(1.0, bound.raw_total);
    bound.variant = BoundVariant::markov;
    return bound;
}

BadCalibrationBound bad_calibration_markov_minimized(double rho, double p, double t, long n, long k,
                                                     std::span<const double> epsilon_grid) {
    if (epsilon_grid.empty()) throw DomainError("bad_calibration_markov_minimized: empty epsilon grid");
    BadCalibrationBound best = bad_calibration_markov(rho, p, t, epsilon_grid.front(), n, k);
    for (const double eps : epsilon_grid.subspan(1)) {
        const BadCalibrationBound candidate = bad_calibration_markov(rho, p, t, eps, n, k);
        if (candidate.raw_total < best.raw_total) best = candidate;
    }
    return best;
}

BadCalibrationBound bad_calibration_uniform_shift(double rho, double t, long n, long k) {
    require_index(n, k);
    if (!(rho >= 0.0)) throw DomainError("bad_calibration_uniform_shift: rho must be >= 0");
    BadCalibrationBound bound;
    bound.t = t;
    bound.epsilon = rho;
    bound.beta_tail = iid_bad_calibration(n, k, std::clamp(t + rho, 0.0, 1.0));
    bound.penalty = 0.0;
    bound.raw_total = bound.beta_tail;
    bound.total = std::min(1.0, bound.raw_total);
    bound.variant = BoundVariant::uniform_shift;
    return bound;
}

std::shared_ptr<const BetaLaw> clustered_law(long k, long m, long b) {
    if (m < 1 || b < 1) throw DomainError("clustered_law: m and b must be >= 1");
    if (k < 1 || k > m * b) throw DomainError("clustered_law: k must satisfy 1 <= k <= m*b");
    const long effective = (k + m - 1) / m;
    return beta_reference(b, effective);
}

double clustered_radius(long k, long m, long b, const QuadratureSpec& spec) {
    const auto clustered = clustered_law(k, m, b);
    const auto reference = beta_reference(m * b, k);
    return w1(*clustered, *reference, spec).distance;
}

double counting_tail_w1(const std::function<double(double)>& count_tail, long n, long k, const QuadratureSpec& spec) {
    require_index(n, k);
    const auto reference = beta_reference(n, k);
    const QuadratureSpec split = spec.with_kinks(quadrature_breakpoints(*reference));
    const auto integrand = [&](double t) { return std::fabs(count_tail(t) - binomial_upper_tail(n, k, t)); };
    return integrate_or_throw(integrand, 0.0, 1.0, split);
}

std::function<double(double)> perfect_cluster_count_tail(long k, long m, long b) {
    if (m < 1 || b < 1 || k < 1) throw DomainError("perfect_cluster_count_tail: k, m, b must be >= 1");
    // m * Z >= k  <=>  Z >= ceil(k/m)
    const long effective = (k + m - 1) / m;
    return [b, effective](double t) { return binomial_upper_tail(b, effective, t); };
}

std::shared_ptr<const EmpiricalLaw> simulate_perfect_cluster(long k, long m, long b, long sims,
                                                             std::uint64_t master_seed, int workers) {
    if (m < 1 || b < 1 || k < 1 || k > m * b) throw DomainError("simulate_perfect_cluster: invalid (k, m, b)");
    if (sims < 1) throw DomainError("simulate_perfect_cluster: sims must be >= 1");
    const auto count = static_cast<std::size_t>(sims);
    std::vector<double> draws(count);
    parallel_for(count, workers, [&](std::size_t rep) {
        UniformStream rng(make_stream(master_seed, "perfect-cluster", rep));
        std::vector<double> scores;
        scores.reserve(static_cast<std::size_t>(m * b));
        for (long j = 0; j < b; ++j) {
            const double v = rng.next();
            for (long r = 0; r < m; ++r) scores.push_back(v);
        }
        auto kth = scores.begin() + (k - 1);
        std::nth_element(scores.begin(), kth, scores.end());
        draws[rep] = *kth;
    });
    return empirical_from_samples(std::move(draws), make_stream(master_seed, "perfect-cluster", 0));
}

} // namespace betacov
