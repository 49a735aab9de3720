#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "betacov/ar1.hpp"
#include "betacov_cli/csv.hpp"

namespace betacov::cli {

struct RunContext {
    std::uint64_t seed = kDefaultSeed;
    long sims = kDefaultSims;
    int threads = 1;
};

struct CommandOutput {
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, CsvTable>> tables;   ///< file name, content
    std::vector<std::string> failures;                      ///< violated internal assertions
};

/// Evenly spaced grid lo, ..., hi with `count` points, each snapped to the
/// nearest double of its 12-significant-digit decimal form (0.1 steps land
/// on the literals 0.3, 0.4, ...).
std::vector<double> linear_grid(double lo, double hi, int count);

struct BetaTailParams {
    std::vector<long> n = {10, 20, 30, 50, 100, 200, 500, 1000};
    double gamma = 0.9;
    std::vector<double> thresholds = {0.80, 0.85};
};
CommandOutput beta_tail(const BetaTailParams& params, const RunContext& ctx);

struct W1BallParams {
    long n = 50;
    double gamma = 0.9;
    std::optional<long> k;   ///< defaults to conformal_index(n, gamma)
    std::vector<double> pi = linear_grid(0.0, 1.0, 51);
    std::vector<double> c = linear_grid(0.0, 1.0, 51);
};
CommandOutput w1_ball(const W1BallParams& params, const RunContext& ctx);

struct HalfnormalParams {
    std::vector<long> n = {50, 200, 1000};
    double gamma = 0.9;
    std::vector<double> r = {0.5, 0.8, 2.0};               ///< cdf-curve ratios
    std::vector<double> summary_r = linear_grid(0.3, 3.0, 28);   ///< merged with r
    int curve_points = 201;
};
CommandOutput halfnormal(const HalfnormalParams& params, const RunContext& ctx);

struct ClusteredParams {
    long n = 100;               ///< fixed-n mode: b = n / m, m must divide n
    std::optional<long> b;      ///< fixed-b mode: n = m * b
    std::vector<long> m = {1, 2, 4, 5, 10, 20, 25};
    double gamma = 0.9;
};
CommandOutput clustered(const ClusteredParams& params, const RunContext& ctx);

struct Ar1Params {
    std::vector<double> a = {0.0, 0.3, 0.6, 0.9};
    std::vector<long> ell = {1, 10, 25};
    std::vector<long> chain_n = {50, 100, 200, 400, 800};
    long curve_n = 50;
    long bound_n = 200;
    std::vector<long> bound_ell = {1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 25};
    std::vector<long> bad_n = {50, 200};
    std::vector<long> bad_ell = {5, 10};
    double gamma = 0.9;
    double eta = 0.05;
    std::optional<double> epsilon;   ///< Markov slack; eta/2 when unset
    int curve_points = 201;
};
CommandOutput ar1(const Ar1Params& params, const RunContext& ctx);

} // namespace betacov::cli
