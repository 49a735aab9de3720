#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string_view>

#include "betacov/quadrature.hpp"
#include "betacov/rng.hpp"
#include "betacov/unit_laws.hpp"

namespace betacov {

/// k_gamma = ceil((n+1) gamma), with gamma read as the decimal it prints as
/// (shortest round-trip representation) and the ceiling taken in exact
/// integer arithmetic. So (9, 0.9) gives 9, not 10.
long conformal_index(long n, double gamma);

struct ConformalConfig {
    long n = 0;
    double gamma = 0.0;
    long k = 0;

    /// k derived as conformal_index(n, gamma).
    static ConformalConfig derived(long n, double gamma);
    /// Explicit threshold index; gamma kept only for reporting.
    static ConformalConfig explicit_index(long n, long k, double gamma = 0.0);

    bool degenerate() const noexcept { return k > n; }
};

/// Marginal coverage of split conformal at level gamma: exactly k/(n+1),
/// contained in [gamma, gamma + 1/(n+1)).
struct CoverageBand {
    double coverage = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Throws DegenerateCoverage when k_gamma > n (coverage is then exactly 1).
CoverageBand marginal_coverage_band(long n, double gamma);

/// P(C_{n,k} <= t) = I_t(k, n+1-k) for continuous i.i.d. scores.
double iid_bad_calibration(long n, long k, double t);

/// P(Bin(n, t) >= k) = I_t(k, n-k+1).
double binomial_upper_tail(long n, long k, double t);

struct CoverageGapReport {
    double reference_mean = 0.0;   ///< k/(n+1)
    double w1_radius = 0.0;        ///< W1(nu, beta_{n,k})
    double gap_bound = 0.0;        ///< bound on |Cov(k) - k/(n+1)|, equals w1_radius
    double nominal_gap_bound = 0.0;   ///< w1_radius + 1/(n+1), bound on |Cov(k_gamma) - gamma|
    double realized_gap = 0.0;     ///< |mean(nu) - k/(n+1)|
    double achieved_tolerance = 0.0;
};

/// Computes W1(nu, beta_{n,k}) and checks the coverage-gap inequality
/// |mean(nu) - k/(n+1)| <= W1 (to 1e-7); throws IdentityViolation if it fails.
CoverageGapReport coverage_gap_report(const UnitLaw& nu, const ConformalConfig& config,
                                      const QuadratureSpec& spec = {});

enum class BoundVariant { markov, uniform_shift };

std::string_view to_string(BoundVariant variant) noexcept;

struct BadCalibrationBound {
    double t = 0.0;
    double epsilon = 0.0;
    double beta_tail = 0.0;   ///< P(B_{n,k} <= t + epsilon)
    double penalty = 0.0;     ///< (rho / epsilon)^p, zero for uniform-shift
    double raw_total = 0.0;   ///< beta_tail + penalty, may exceed one
    double total = 0.0;       ///< min(1, raw_total)
    BoundVariant variant = BoundVariant::markov;
};

/// P(D <= t) <= P(B <= t + eps) + (rho/eps)^p for any law within W_p radius rho.
BadCalibrationBound bad_calibration_markov(double rho, double p, double t, double epsilon, long n, long k);

/// Smallest Markov bound over an epsilon grid. Reported alongside the
/// user-chosen epsilon; no claim that this is the optimal choice.
BadCalibrationBound bad_calibration_markov_minimized(double rho, double p, double t, long n, long k,
                                                     std::span<const double> epsilon_grid);

/// P(D <= t) <= P(B <= t + rho) when |D - B| <= rho under some coupling.
BadCalibrationBound bad_calibration_uniform_shift(double rho, double t, long n, long k);

/// Law of U_(k) when n = m*b scores come in b perfect clusters of size m:
/// beta_{b, ceil(k/m)} = Beta(ceil(k/m), b+1-ceil(k/m)).
std::shared_ptr<const BetaLaw> clustered_law(long k, long m, long b);

/// W1(clustered_law(k, m, b), beta_{mb,k}).
double clustered_radius(long k, long m, long b, const QuadratureSpec& spec = {});

/// W1 between the law of U_(k) given through its count tail
/// t -> P(N_n(t) >= k) and beta_{n,k}, whose count tail is binomial.
double counting_tail_w1(const std::function<double(double)>& count_tail, long n, long k,
                        const QuadratureSpec& spec = {});

/// t -> P(m * Bin(b, t) >= k), the count tail of the perfect-cluster model.
std::function<double(double)> perfect_cluster_count_tail(long k, long m, long b);

/// Monte Carlo draws of U_(k) under the perfect-cluster model: b uniforms,
/// each repeated m times, k-th smallest of the n = m*b values.
std::shared_ptr<const EmpiricalLaw> simulate_perfect_cluster(long k, long m, long b, long sims,
                                                             std::uint64_t master_seed, int workers = 1);

} // namespace betacov
