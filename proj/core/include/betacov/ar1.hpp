#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "betacov/transport.hpp"
#include "betacov/unit_laws.hpp"

namespace betacov {

inline constexpr std::uint64_t kDefaultSeed = 20250101;
inline constexpr long kDefaultSims = 50000;

/// Stationary Gaussian AR(1) scores T_i = a T_{i-1} + e_i, e_i ~ N(0, 1-a^2),
/// calibrated on T_1..T_n and tested at T_{n+ell}.
struct Ar1Config {
    double a = 0.0;
    long n = 50;
    long ell = 1;
    double gamma = 0.9;
    long sims = kDefaultSims;
    std::uint64_t master_seed = kDefaultSeed;

    /// Throws DomainError unless |a| < 1, n >= 2, ell >= 1, 0 < gamma < 1, sims >= 1.
    void validate() const;
    long k() const;
};

/// How the test point is attached to the calibration block.
enum class TestCoupling {
    markov,      ///< T_{n+ell} | C_n ~ N(a^ell T_n, 1 - a^(2 ell))
    decoupled,   ///< independent test point: D = Phi(T_(k))
};

/// Calibration path T_1..T_n of replication `replication`. T_1 is drawn from
/// the stationary N(0,1) law; the stream is stream_id("ar1", replication)
/// under config.master_seed.
std::vector<double> simulate_ar1(const Ar1Config& config, std::uint64_t replication);

/// Phi((T_(k) - a^ell T_n) / sqrt(1 - a^(2 ell))).
double realized_coverage_ar1(double order_statistic, double last_score, double a, long ell);

/// Realized coverages in replication order (needed for batch standard errors).
/// Identical for any worker count. Throws DegenerateCoverage if k_gamma > n.
std::vector<double> simulate_realized_coverage(const Ar1Config& config, int workers = 1,
                                               TestCoupling coupling = TestCoupling::markov);

std::shared_ptr<const EmpiricalLaw> mc_coverage_law(const Ar1Config& config, int workers = 1,
                                                    TestCoupling coupling = TestCoupling::markov);

/// tau_gamma from gamma(1-gamma) + 2 sum_j [Phi2(z, z; a^j) - gamma^2],
/// z = Phi^{-1}(gamma), truncated once the remaining terms fall below
/// `truncation_tol`.
double long_run_sd(double gamma, double a, double truncation_tol = 1e-12);

struct BerryEsseenRadius {
    double delta_term = 0.0;   ///< |a|^ell, test-calibration decoupling
    double floor_term = 0.0;   ///< sqrt(2/(pi n)) |tau - sqrt(gamma(1-gamma))|
    double total() const noexcept { return delta_term + floor_term; }
};

/// Asymptotic W1 radius with the O(n^{-1/2}) remainder dropped.
BerryEsseenRadius berry_esseen_radius(long n, double gamma, double a, long ell);

/// W1 of the sample against `reference` with a standard error from
/// splitting the replication-ordered sample into `batches` equal parts.
McEstimate batched_w1(std::span<const double> replication_ordered, const UnitLaw& reference,
                      int batches = 20);

struct BoundChainRow {
    Ar1Config config;
    long k = 0;
    double mc_mean = 0.0;
    double mc_gap = 0.0;      ///< |mean - k/(n+1)|
    double mc_gap_se = 0.0;
    double mc_w1 = 0.0;       ///< W1(empirical, beta_{n,k})
    double mc_w1_se = 0.0;
    BerryEsseenRadius radius;
    double analytic_bound = 0.0;
    double combined_se = 0.0;
    bool chain_holds = false;   ///< mc_gap <= mc_w1 + 3 combined_se
};

BoundChainRow bound_chain(const Ar1Config& config, int workers = 1);
BoundChainRow bound_chain_from_sample(const Ar1Config& config, std::span<const double> replication_ordered);

struct BadCalibrationRow {
    Ar1Config config;
    long k = 0;
    double eta = 0.0;
    double threshold = 0.0;   ///< gamma - eta
    double mc_tail = 0.0;     ///< fraction of replications with D <= gamma - eta
    double mc_tail_se = 0.0;
    double beta_tail = 0.0;   ///< P(B <= gamma - eta/2)
    double mc_w1 = 0.0;
    double mc_w1_se = 0.0;
    double bound_raw = 0.0;   ///< beta_tail + 2 mc_w1 / eta
    double bound = 0.0;       ///< min(1, bound_raw)
    double combined_se = 0.0;
    bool holds = false;       ///< mc_tail <= bound_raw + 3 combined_se
};

BadCalibrationRow bad_calibration_report(const Ar1Config& config, double eta, int workers = 1);
BadCalibrationRow bad_calibration_from_sample(const Ar1Config& config, double eta,
                                              std::span<const double> replication_ordered,
                                              const McEstimate& w1);

} // namespace betacov
