#include <benchmark/benchmark.h>

#include <vector>

#include "betacov/ar1.hpp"
#include "betacov/halfnormal.hpp"
#include "betacov/numerics.hpp"
#include "betacov/rng.hpp"
#include "betacov/transport.hpp"
#include "betacov/unit_laws.hpp"

using namespace betacov;

static void BM_IncompleteBeta(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    double x = 0.0;
    for (auto _ : state) {
        x += 1e-3;
        if (x >= 1.0) x = 1e-3;
        benchmark::DoNotOptimize(regularized_incomplete_beta(x, a, 0.1 * a + 1.0));
    }
}
BENCHMARK(BM_IncompleteBeta)->Arg(3)->Arg(30)->Arg(300)->Arg(3000);

static void BM_InverseIncompleteBeta(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    double p = 0.0;
    for (auto _ : state) {
        p += 1e-3;
        if (p >= 1.0) p = 1e-3;
        benchmark::DoNotOptimize(inverse_incomplete_beta(p, a, 0.1 * a + 1.0));
    }
}
BENCHMARK(BM_InverseIncompleteBeta)->Arg(3)->Arg(30)->Arg(300);

static void BM_BivariateNormal(benchmark::State& state) {
    const double z = std_normal_quantile(0.9);
    for (auto _ : state) benchmark::DoNotOptimize(bivariate_normal_cdf(z, z, 0.81));
}
BENCHMARK(BM_BivariateNormal);

static void BM_W1Contaminated(benchmark::State& state) {
    const auto reference = beta_reference(state.range(0), state.range(0) * 9 / 10);
    const auto law = contaminate(reference, 0.3, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(w1(*law, *reference).distance);
}
BENCHMARK(BM_W1Contaminated)->Arg(50)->Arg(1000);

static void BM_W1Pushforward(benchmark::State& state) {
    const long n = state.range(0);
    const long k = n * 9 / 10;
    const auto reference = beta_reference(n, k);
    const auto law = transported_law(n, k, ScaleShift(1.1));
    for (auto _ : state) benchmark::DoNotOptimize(w1(*law, *reference).distance);
}
BENCHMARK(BM_W1Pushforward)->Arg(50)->Arg(1000);

static void BM_W1Empirical(benchmark::State& state) {
    const auto size = static_cast<std::size_t>(state.range(0));
    UniformStream u(make_stream(1, "bench", 0));
    std::vector<double> draws(size);
    for (auto& x : draws) x = inverse_incomplete_beta(u.next(), 46, 5);
    const auto sample = empirical_from_samples(std::move(draws));
    const auto reference = beta_reference(50, 46);
    for (auto _ : state) benchmark::DoNotOptimize(w1_empirical(*sample, *reference).distance);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_W1Empirical)->Arg(1000)->Arg(50000)->Unit(benchmark::kMillisecond);

static void BM_Ar1RealizedCoverage(benchmark::State& state) {
    Ar1Config config;
    config.a = 0.6;
    config.n = state.range(0);
    config.ell = 10;
    config.sims = 2000;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_realized_coverage(config));
    state.SetItemsProcessed(state.iterations() * config.sims);
}
BENCHMARK(BM_Ar1RealizedCoverage)->Arg(50)->Arg(800)->Unit(benchmark::kMillisecond);

static void BM_LongRunSd(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0)) / 100.0;
    for (auto _ : state) benchmark::DoNotOptimize(long_run_sd(0.9, a));
}
BENCHMARK(BM_LongRunSd)->Arg(30)->Arg(90);

BENCHMARK_MAIN();
