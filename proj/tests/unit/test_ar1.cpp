#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "betacov/ar1.hpp"
#include "betacov/error.hpp"
#include "betacov/numerics.hpp"
#include "betacov/transport.hpp"
#include "betacov/unit_laws.hpp"

using namespace betacov;

namespace {

Ar1Config config(double a, long n, long ell, long sims = 4000) {
    Ar1Config c;
    c.a = a;
    c.n = n;
    c.ell = ell;
    c.sims = sims;
    return c;
}

} // namespace

TEST(Ar1Config, Validation) {
    EXPECT_NO_THROW(config(0.9, 50, 1).validate());
    EXPECT_THROW(config(1.0, 50, 1).validate(), DomainError);
    EXPECT_THROW(config(0.5, 1, 1).validate(), DomainError);
    EXPECT_THROW(config(0.5, 50, 0).validate(), DomainError);
    EXPECT_THROW(config(0.5, 50, 1, 0).validate(), DomainError);
    Ar1Config bad_gamma = config(0.5, 50, 1);
    bad_gamma.gamma = 1.0;
    EXPECT_THROW(bad_gamma.validate(), DomainError);
    EXPECT_EQ(config(0.5, 50, 1).k(), 46);
}

TEST(Ar1Simulation, DeterministicPerReplication) {
    const auto c = config(0.6, 100, 1);
    EXPECT_EQ(simulate_ar1(c, 5), simulate_ar1(c, 5));
    EXPECT_NE(simulate_ar1(c, 5), simulate_ar1(c, 6));
}

TEST(Ar1Simulation, StationaryMomentsAndLagOneCorrelation) {
    for (const double a : {0.0, 0.3, 0.9}) {
        const auto c = config(a, 200, 1);
        double sum = 0.0, sum_sq = 0.0, cross = 0.0;
        long count = 0, pairs = 0;
        for (std::uint64_t rep = 0; rep < 2000; ++rep) {
            const auto path = simulate_ar1(c, rep);
            for (std::size_t i = 0; i < path.size(); ++i) {
                sum += path[i];
                sum_sq += path[i] * path[i];
                ++count;
                if (i > 0) {
                    cross += path[i] * path[i - 1];
                    ++pairs;
                }
            }
        }
        EXPECT_NEAR(sum / count, 0.0, 0.02) << a;
        EXPECT_NEAR(sum_sq / count, 1.0, 0.02) << a;
        EXPECT_NEAR(cross / pairs, a, 0.02) << a;
    }
}

TEST(RealizedCoverage, HandComputedCases) {
    EXPECT_NEAR(realized_coverage_ar1(1.2816, 3.0, 0.0, 1), std_normal_cdf(1.2816), 1e-15);
    EXPECT_NEAR(realized_coverage_ar1(1.0, 0.0, 0.5, 1), std_normal_cdf(1.0 / std::sqrt(0.75)), 1e-15);
    EXPECT_NEAR(realized_coverage_ar1(1.0, 2.0, 0.5, 1), std_normal_cdf(0.0), 1e-15);
    EXPECT_NEAR(realized_coverage_ar1(1.0, 2.0, 0.5, 2), std_normal_cdf(0.5 / std::sqrt(1.0 - 0.0625)), 1e-15);
}

TEST(RealizedCoverage, LongHorizonDecouples) {
    EXPECT_NEAR(realized_coverage_ar1(1.1, 2.5, 0.6, 200), std_normal_cdf(1.1), 1e-14);
}

TEST(RealizedCoverage, IndependentOfWorkerCount) {
    const auto c = config(0.6, 50, 10, 3000);
    EXPECT_EQ(simulate_realized_coverage(c, 1), simulate_realized_coverage(c, 8));
    EXPECT_EQ(simulate_realized_coverage(c, 1, TestCoupling::decoupled),
              simulate_realized_coverage(c, 3, TestCoupling::decoupled));
}

TEST(RealizedCoverage, IidMeanIsNominal) {
    const auto c = config(0.0, 50, 1, 20000);
    const auto law = mc_coverage_law(c);
    EXPECT_NEAR(law->mean(), 46.0 / 51.0, 3.0 * law->standard_error_of_mean());
    EXPECT_LT(w1_empirical(*law, *beta_reference(50, 46)).distance, 0.01);
}

TEST(RealizedCoverage, DegenerateIndexThrows) {
    Ar1Config c = config(0.3, 10, 1);
    c.gamma = 0.95;
    EXPECT_THROW(simulate_realized_coverage(c), DegenerateCoverage);
}

TEST(LongRunSd, IndependentCaseAndOracles) {
    EXPECT_NEAR(long_run_sd(0.9, 0.0), 0.3, 1e-15);
    EXPECT_NEAR(long_run_sd(0.9, 0.3), 0.34872177122468770702, 1e-10);
    EXPECT_NEAR(long_run_sd(0.9, 0.6), 0.46280034196629392469, 1e-10);
    EXPECT_NEAR(long_run_sd(0.9, 0.9), 0.95493949721868470058, 1e-10);
}

TEST(LongRunSd, IncreasesWithPositiveDependence) {
    double previous = 0.0;
    for (const double a : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
        const double tau = long_run_sd(0.9, a);
        EXPECT_GT(tau, previous);
        previous = tau;
    }
}

TEST(BerryEsseen, Components) {
    const auto zero = berry_esseen_radius(50, 0.9, 0.0, 1);
    EXPECT_EQ(zero.delta_term, 0.0);
    EXPECT_NEAR(zero.floor_term, 0.0, 1e-15);
    const auto r = berry_esseen_radius(200, 0.9, 0.6, 3);
    EXPECT_NEAR(r.delta_term, 0.216, 1e-15);
    EXPECT_NEAR(r.floor_term, std::sqrt(2.0 / (std::numbers::pi * 200.0)) * (long_run_sd(0.9, 0.6) - 0.3), 1e-15);
    EXPECT_EQ(r.total(), r.delta_term + r.floor_term);
}

TEST(BatchedW1, PointEstimateIsFullSampleDistance) {
    const auto c = config(0.3, 50, 1, 4000);
    const auto draws = simulate_realized_coverage(c);
    const auto reference = beta_reference(50, 46);
    const McEstimate estimate = batched_w1(draws, *reference);
    EXPECT_NEAR(estimate.value, w1_empirical(*empirical_from_samples(draws), *reference).distance, 1e-15);
    EXPECT_GT(estimate.standard_error, 0.0);
}

TEST(BoundChain, IndependentScoresAreNearlyExact) {
    const auto row = bound_chain(config(0.0, 50, 1, 20000));
    EXPECT_EQ(row.k, 46);
    EXPECT_LT(row.mc_gap, 0.01);
    EXPECT_LT(row.mc_w1, 0.01);
    EXPECT_NEAR(row.analytic_bound, 0.0, 1e-15);
    EXPECT_TRUE(row.chain_holds);
}

TEST(BoundChain, StrongDependenceShortHorizon) {
    const auto row = bound_chain(config(0.9, 50, 1, 20000));
    EXPECT_TRUE(row.chain_holds);
    EXPECT_LE(row.mc_gap, row.mc_w1 + 3.0 * row.combined_se);
    EXPECT_GT(row.analytic_bound, row.mc_w1);
}

TEST(BadCalibration, ReportHoldsAndCapsBound) {
    const auto row = bad_calibration_report(config(0.9, 50, 5, 20000), 0.05);
    EXPECT_NEAR(row.threshold, 0.85, 1e-15);
    EXPECT_GT(row.bound_raw, 1.0);
    EXPECT_EQ(row.bound, 1.0);
    EXPECT_TRUE(row.holds);

    const auto mild = bad_calibration_report(config(0.3, 200, 10, 20000), 0.05);
    EXPECT_TRUE(mild.holds);
    EXPECT_NEAR(mild.bound, std::min(1.0, mild.bound_raw), 1e-15);
}
