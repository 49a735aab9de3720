#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "betacov/conformal.hpp"
#include "betacov/error.hpp"
#include "betacov/halfnormal.hpp"
#include "betacov/transport.hpp"
#include "betacov/unit_laws.hpp"

using namespace betacov;

namespace {

long double binomial_tail_by_summation(long n, long k, long double t) {
    long double total = 0.0L;
    for (long j = k; j <= n; ++j) {
        const long double log_choose = std::lgamma(static_cast<long double>(n + 1)) -
                                       std::lgamma(static_cast<long double>(j + 1)) -
                                       std::lgamma(static_cast<long double>(n - j + 1));
        total += std::exp(log_choose + j * std::log(t) + (n - j) * std::log1p(-t));
    }
    return total;
}

} // namespace

TEST(ConformalIndex, DecimalGammaIsExact) {
    EXPECT_EQ(conformal_index(9, 0.9), 9);
    EXPECT_EQ(conformal_index(10, 0.95), 11);
    EXPECT_EQ(conformal_index(30, 0.9), 28);
    EXPECT_EQ(conformal_index(99, 0.9), 90);
    EXPECT_EQ(conformal_index(100, 0.9), 91);
    EXPECT_EQ(conformal_index(19, 0.95), 19);
    EXPECT_EQ(conformal_index(999, 0.999), 999);
}

TEST(ConformalIndex, MatchesIntegerCeilingForPercentLevels) {
    for (long n = 1; n <= 400; ++n) {
        for (long percent = 1; percent < 100; ++percent) {
            const double gamma = static_cast<double>(percent) / 100.0;
            const long expected = ((n + 1) * percent + 99) / 100;
            ASSERT_EQ(conformal_index(n, gamma), expected) << n << " " << gamma;
        }
    }
}

TEST(ConformalIndex, RejectsBadArguments) {
    EXPECT_THROW(conformal_index(0, 0.9), DomainError);
    EXPECT_THROW(conformal_index(10, 0.0), DomainError);
    EXPECT_THROW(conformal_index(10, 1.0), DomainError);
}

TEST(ConformalConfig, DerivedAndExplicit) {
    const auto derived = ConformalConfig::derived(10, 0.95);
    EXPECT_EQ(derived.k, 11);
    EXPECT_TRUE(derived.degenerate());
    const auto manual = ConformalConfig::explicit_index(50, 40);
    EXPECT_EQ(manual.k, 40);
    EXPECT_FALSE(manual.degenerate());
    EXPECT_THROW(ConformalConfig::explicit_index(5, 0), DomainError);
}

TEST(MarginalCoverage, BandContainsExactCoverage) {
    for (const long n : {9L, 20L, 30L, 99L, 500L}) {
        for (const double gamma : {0.5, 0.8, 0.9}) {
            const CoverageBand band = marginal_coverage_band(n, gamma);
            EXPECT_GE(band.coverage, band.lower);
            EXPECT_LT(band.coverage, band.upper);
            EXPECT_EQ(band.coverage, static_cast<double>(conformal_index(n, gamma)) / (n + 1));
        }
    }
}

TEST(MarginalCoverage, DegenerateIndexIsReported) {
    try {
        marginal_coverage_band(10, 0.95);
        FAIL() << "expected DegenerateCoverage";
    } catch (const DegenerateCoverage& e) {
        EXPECT_EQ(e.n(), 10);
        EXPECT_EQ(e.k(), 11);
    }
}

TEST(BadCalibrationIid, ReferenceValues) {
    const double at085 = iid_bad_calibration(30, 28, 0.85);
    const double at080 = iid_bad_calibration(30, 28, 0.80);
    EXPECT_GE(at085, 0.14);
    EXPECT_LE(at085, 0.16);
    EXPECT_GE(at080, 0.03);
    EXPECT_LE(at080, 0.05);
    EXPECT_EQ(iid_bad_calibration(30, 28, 0.0), 0.0);
    EXPECT_EQ(iid_bad_calibration(30, 28, 1.0), 1.0);
    EXPECT_THROW(iid_bad_calibration(30, 31, 0.5), DomainError);
}

TEST(BinomialTail, MatchesDirectSummation) {
    for (long n = 1; n <= 60; ++n) {
        for (long k = 1; k <= n; k += (n > 20 ? 3 : 1)) {
            for (const double t : {0.01, 0.2, 0.5, 0.77, 0.93}) {
                const long double expected = binomial_tail_by_summation(n, k, t);
                ASSERT_NEAR(binomial_upper_tail(n, k, t), static_cast<double>(expected), 1e-13)
                    << n << " " << k << " " << t;
            }
        }
    }
}

TEST(BinomialTail, EdgeIndices) {
    EXPECT_EQ(binomial_upper_tail(10, 0, 0.3), 1.0);
    EXPECT_EQ(binomial_upper_tail(10, 11, 0.3), 0.0);
}

TEST(CoverageGap, ReportRespectsRadius) {
    const auto config = ConformalConfig::derived(50, 0.9);
    const auto reference = beta_reference(config.n, config.k);
    const auto self = coverage_gap_report(*reference, config);
    EXPECT_NEAR(self.w1_radius, 0.0, 1e-12);
    EXPECT_NEAR(self.reference_mean, 46.0 / 51.0, 1e-15);

    const auto shifted = contaminate(reference, 0.2, 0.3);
    const auto report = coverage_gap_report(*shifted, config);
    EXPECT_LE(report.realized_gap, report.w1_radius + 1e-9);
    EXPECT_NEAR(report.nominal_gap_bound, report.w1_radius + 1.0 / 51.0, 1e-15);
    EXPECT_EQ(report.gap_bound, report.w1_radius);
}

TEST(BadCalibrationMarkov, Components) {
    const auto bound = bad_calibration_markov(0.02, 1.0, 0.8, 0.05, 30, 28);
    EXPECT_NEAR(bound.beta_tail, iid_bad_calibration(30, 28, 0.85), 1e-15);
    EXPECT_NEAR(bound.penalty, 0.4, 1e-15);
    EXPECT_NEAR(bound.raw_total, bound.beta_tail + 0.4, 1e-15);
    EXPECT_EQ(bound.total, bound.raw_total);
    EXPECT_EQ(bound.variant, BoundVariant::markov);

    const auto vacuous = bad_calibration_markov(0.2, 1.0, 0.8, 0.05, 30, 28);
    EXPECT_GT(vacuous.raw_total, 1.0);
    EXPECT_EQ(vacuous.total, 1.0);

    EXPECT_THROW(bad_calibration_markov(0.1, 1.0, 0.8, 0.0, 30, 28), DomainError);
    EXPECT_THROW(bad_calibration_markov(0.1, 0.5, 0.8, 0.1, 30, 28), DomainError);
}

TEST(BadCalibrationMarkov, MinimizedOverGrid) {
    const std::vector<double> grid{0.01, 0.02, 0.05, 0.1, 0.15};
    const auto best = bad_calibration_markov_minimized(0.01, 2.0, 0.8, 30, 28, grid);
    for (const double eps : grid) {
        EXPECT_LE(best.raw_total, bad_calibration_markov(0.01, 2.0, 0.8, eps, 30, 28).raw_total);
    }
    EXPECT_THROW(bad_calibration_markov_minimized(0.01, 2.0, 0.8, 30, 28, {}), DomainError);
}

TEST(BadCalibrationUniformShift, ShiftsThreshold) {
    const auto bound = bad_calibration_uniform_shift(0.05, 0.8, 30, 28);
    EXPECT_NEAR(bound.total, iid_bad_calibration(30, 28, 0.85), 1e-15);
    EXPECT_EQ(bound.penalty, 0.0);
    EXPECT_EQ(bound.variant, BoundVariant::uniform_shift);
    EXPECT_EQ(to_string(BoundVariant::uniform_shift), "uniform-shift");
}

TEST(Clustered, LawUsesEffectiveIndex) {
    const auto law = clustered_law(91, 4, 25);
    EXPECT_EQ(law->n(), 25);
    EXPECT_EQ(law->k(), 23);
    EXPECT_THROW(clustered_law(101, 4, 25), DomainError);
}

TEST(Clustered, RadiusOracle) {
    EXPECT_NEAR(clustered_radius(91, 4, 25), 0.025690934028662203269, 1e-9);
    EXPECT_NEAR(clustered_radius(91, 1, 100), 0.0, 1e-12);
}

TEST(Clustered, CountingFormMatchesClosedForm) {
    for (const long m : {1L, 2L, 4L, 5L, 10L, 20L, 25L}) {
        const long b = 100 / m;
        const double closed = clustered_radius(91, m, b);
        const double counting = counting_tail_w1(perfect_cluster_count_tail(91, m, b), 100, 91);
        EXPECT_NEAR(closed, counting, 1e-8) << m;
    }
}

TEST(Clustered, RadiusGrowsWithClusterSize) {
    double previous = -1.0;
    for (const long m : {1L, 2L, 4L, 5L, 10L, 20L, 25L}) {
        const double radius = clustered_radius(91, m, 100 / m);
        EXPECT_GT(radius, previous) << m;
        previous = radius;
    }
}

TEST(Clustered, MonteCarloMatchesLaw) {
    const auto sample = simulate_perfect_cluster(91, 4, 25, 50000, 20250101);
    EXPECT_LT(w1_empirical(*sample, *clustered_law(91, 4, 25)).distance, 0.01);
    const auto again = simulate_perfect_cluster(91, 4, 25, 2000, 20250101, 4);
    const auto serial = simulate_perfect_cluster(91, 4, 25, 2000, 20250101, 1);
    EXPECT_TRUE(std::equal(again->values().begin(), again->values().end(), serial->values().begin()));
}

TEST(BadCalibrationMarkov, TermsMoveOppositelyInEpsilon) {
    double previous_tail = 0.0;
    double previous_penalty = INFINITY;
    for (int j = 1; j <= 40; ++j) {
        const auto bound = bad_calibration_markov(0.01, 1.0, 0.8, 0.005 * j, 50, 46);
        EXPECT_GE(bound.beta_tail, previous_tail);
        EXPECT_LE(bound.penalty, previous_penalty);
        previous_tail = bound.beta_tail;
        previous_penalty = bound.penalty;
    }
}

TEST(BadCalibrationMarkov, MinimizedBoundDominatesHalfNormalTail) {
    std::vector<double> grid;
    for (int j = 1; j <= 100; ++j) grid.push_back(0.0025 * j);
    for (const long n : {30L, 50L, 200L}) {
        const long k = conformal_index(n, 0.9);
        const auto reference = beta_reference(n, k);
        for (const double r : {1.1, 1.5, 2.0}) {
            const ScaleShift shift(r);
            const double rho = w1(*transported_law(n, k, shift), *reference).distance;
            for (const double t : {0.7, 0.8, 0.85}) {
                const double exact_tail = reference->cdf(h_inverse(t, shift));
                const auto bound = bad_calibration_markov_minimized(rho, 1.0, t, n, k, grid);
                EXPECT_GE(bound.raw_total, exact_tail) << n << " " << r << " " << t;
            }
        }
    }
}

TEST(Clustered, SingletonClustersRecoverBetaReference) {
    for (const long b : {10L, 60L}) {
        const long k = b * 3 / 4;
        const auto clustered = clustered_law(k, 1, b);
        const auto reference = beta_reference(b, k);
        for (int i = 0; i <= 1000; ++i) ASSERT_EQ(clustered->cdf(i / 1000.0), reference->cdf(i / 1000.0));
    }
}
