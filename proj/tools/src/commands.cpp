#include "betacov_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include <fmt/format.h>

#include "betacov/conformal.hpp"
#include "betacov/error.hpp"
#include "betacov/halfnormal.hpp"
#include "betacov/numerics.hpp"
#include "betacov/parallel.hpp"
#include "betacov/rng.hpp"
#include "betacov/transport.hpp"

namespace betacov::cli {

namespace {

constexpr double kIdentityTolerance = 1e-7;

long checked_index(long n, double gamma) {
    const long k = conformal_index(n, gamma);
    if (k > n) {
        throw DegenerateCoverage(
            fmt::format("n = {}, gamma = {}: k_gamma = {} exceeds n, coverage is identically 1", n, gamma, k), n, k);
    }
    return k;
}

void require(bool condition, const std::string& message) {
    if (!condition) throw DomainError(message);
}

template <class T>
std::vector<T> sorted_unique(std::vector<T> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

double fraction_at_most(const std::vector<double>& sorted, double t) {
    const auto hits = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    return static_cast<double>(hits) / static_cast<double>(sorted.size());
}

std::vector<double> unit_grid(int points) {
    require(points >= 2, "curve points must be >= 2");
    return linear_grid(0.0, 1.0, points);
}

} // namespace

std::vector<double> linear_grid(double lo, double hi, int count) {
    if (count < 1) throw DomainError("linear_grid: count must be >= 1");
    if (count == 1) return {lo};
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double span = static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) {
        const double x = (lo * static_cast<double>(count - 1 - i) + hi * static_cast<double>(i)) / span;
        grid[static_cast<std::size_t>(i)] = std::stod(fmt::format("{:.12g}", x));
    }
    return grid;
}

// ---------------------------------------------------------------------------
// beta-tail

CommandOutput beta_tail(const BetaTailParams& params, const RunContext& ctx) {
    require(!params.n.empty() && !params.thresholds.empty(), "beta-tail: n and t lists must be non-empty");
    for (const double t : params.thresholds) require(t >= 0.0 && t <= 1.0, "beta-tail: thresholds must lie in [0,1]");
    const auto ns = sorted_unique(params.n);
    const auto ts = sorted_unique(params.thresholds);

    CommandOutput out;
    out.parameters["n"] = ns;
    out.parameters["gamma"] = params.gamma;
    out.parameters["t"] = ts;

    CsvTable table({"n", "gamma", "k", "t", "analytic_tail", "mc_tail", "mc_se"});
    const auto sims = static_cast<std::size_t>(ctx.sims);
    for (const long n : ns) {
        require(n >= 1, "beta-tail: n must be >= 1");
        const long k = checked_index(n, params.gamma);
        // k-th order statistic of n uniforms, one stream per replication.
        std::vector<double> draws(sims);
        parallel_for(sims, ctx.threads, [&](std::size_t rep) {
            UniformStream rng(make_stream(ctx.seed, "beta-tail", rep));
            std::vector<double> u(static_cast<std::size_t>(n));
            for (double& x : u) x = rng.next();
            std::nth_element(u.begin(), u.begin() + (k - 1), u.end());
            draws[rep] = u[static_cast<std::size_t>(k - 1)];
        });
        std::sort(draws.begin(), draws.end());
        for (const double t : ts) {
            const double mc = fraction_at_most(draws, t);
            table.add_row({n, params.gamma, k, t, iid_bad_calibration(n, k, t), mc,
                           std::sqrt(mc * (1.0 - mc) / static_cast<double>(sims))});
        }
    }
    out.tables.emplace_back("beta_tail.csv", std::move(table));
    return out;
}

// ---------------------------------------------------------------------------
// w1-ball

CommandOutput w1_ball(const W1BallParams& params, const RunContext& ctx) {
    require(params.n >= 1, "w1-ball: n must be >= 1");
    const long k = params.k.value_or(checked_index(params.n, params.gamma));
    require(k >= 1 && k <= params.n, "w1-ball: k must satisfy 1 <= k <= n");
    for (const double p : params.pi) require(p >= 0.0 && p <= 1.0, "w1-ball: pi grid must lie in [0,1]");
    for (const double c : params.c) require(c >= 0.0 && c <= 1.0, "w1-ball: c grid must lie in [0,1]");
    const auto pis = sorted_unique(params.pi);
    const auto cs = sorted_unique(params.c);

    CommandOutput out;
    out.parameters["n"] = params.n;
    out.parameters["k"] = k;
    out.parameters["gamma"] = params.gamma;
    out.parameters["pi"] = pis;
    out.parameters["c"] = cs;

    const auto reference = beta_reference(params.n, k);
    std::vector<double> values(pis.size() * cs.size());
    parallel_for(values.size(), ctx.threads, [&](std::size_t idx) {
        const double pi = pis[idx / cs.size()];
        const double c = cs[idx % cs.size()];
        values[idx] = w1(*contaminate(reference, pi, c), *reference).distance;
    });

    CsvTable table({"n", "k", "pi", "c", "w1"});
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        table.add_row({params.n, k, pis[idx / cs.size()], cs[idx % cs.size()], values[idx]});
    }
    out.tables.emplace_back("w1_ball.csv", std::move(table));
    return out;
}

// ---------------------------------------------------------------------------
// halfnormal

CommandOutput halfnormal(const HalfnormalParams& params, const RunContext& ctx) {
    require(!params.n.empty() && !params.r.empty(), "halfnormal: n and r lists must be non-empty");
    for (const double r : params.r) require(r > 0.0, "halfnormal: r must be > 0");
    for (const double r : params.summary_r) require(r > 0.0, "halfnormal: summary r must be > 0");
    const auto ns = sorted_unique(params.n);
    const auto curve_rs = sorted_unique(params.r);
    std::vector<double> summary_rs = params.summary_r;
    summary_rs.insert(summary_rs.end(), curve_rs.begin(), curve_rs.end());
    summary_rs = sorted_unique(summary_rs);
    const auto ts = unit_grid(params.curve_points);

    CommandOutput out;
    out.parameters["n"] = ns;
    out.parameters["gamma"] = params.gamma;
    out.parameters["r"] = curve_rs;
    out.parameters["summary_r"] = summary_rs;
    out.parameters["curve_points"] = params.curve_points;

    CsvTable curves({"n", "r", "t", "F_beta", "F_transported"});
    for (const long n : ns) {
        require(n >= 1, "halfnormal: n must be >= 1");
        const long k = checked_index(n, params.gamma);
        const auto reference = beta_reference(n, k);
        for (const double r : curve_rs) {
            const auto moved = transported_law(n, k, ScaleShift(r));
            for (const double t : ts) curves.add_row({n, r, t, reference->cdf(t), moved->cdf(t)});
        }
    }

    struct SummaryRow {
        long n = 0, k = 0;
        double r = 0, coverage = 0, w1_quadrature = 0, gap_exact = 0, w1_mc = 0, mc_se = 0, local_approx = 0;
    };
    std::vector<std::pair<long, double>> jobs;
    for (const long n : ns) {
        for (const double r : summary_rs) jobs.emplace_back(n, r);
    }

    // Beta draws by inverse cdf, shared across r for each n.
    const auto sims = static_cast<std::size_t>(ctx.sims);
    std::map<long, std::vector<double>> beta_draws;
    for (const long n : ns) {
        const long k = checked_index(n, params.gamma);
        auto& draws = beta_draws[n];
        draws.resize(sims);
        parallel_for(sims, ctx.threads, [&](std::size_t rep) {
            UniformStream rng(make_stream(ctx.seed, "halfnormal", rep));
            draws[rep] = inverse_incomplete_beta(rng.next(), static_cast<double>(k), static_cast<double>(n + 1 - k));
        });
    }

    std::vector<SummaryRow> rows(jobs.size());
    parallel_for(jobs.size(), ctx.threads, [&](std::size_t j) {
        const auto [n, r] = jobs[j];
        const long k = conformal_index(n, params.gamma);
        const ScaleShift shift(r);
        const auto reference = beta_reference(n, k);
        const auto moved = transported_law(n, k, shift);
        const TransportMap map = halfnormal_map(shift);

        SummaryRow row;
        row.n = n;
        row.k = k;
        row.r = r;
        row.coverage = shifted_coverage(n, k, shift);
        row.gap_exact = std::fabs(row.coverage - reference->mean());
        row.w1_quadrature = w1(*moved, *reference).distance;
        std::vector<double> transported(beta_draws.at(n).size());
        std::transform(beta_draws.at(n).begin(), beta_draws.at(n).end(), transported.begin(),
                       [&map](double b) { return map(b); });
        const McEstimate mc = batched_w1(transported, *reference);
        row.w1_mc = mc.value;
        row.mc_se = mc.standard_error;
        row.local_approx = local_shift_gap(params.gamma, std::log(r));
        rows[j] = row;
    });

    CsvTable summary({"n", "k", "r", "coverage", "w1_quadrature", "gap_exact", "w1_mc", "mc_se", "local_approx"});
    for (const auto& row : rows) {
        summary.add_row({row.n, row.k, row.r, row.coverage, row.w1_quadrature, row.gap_exact, row.w1_mc, row.mc_se,
                         row.local_approx});
        if (!(std::fabs(row.w1_quadrature - row.gap_exact) <= kIdentityTolerance)) {
            out.failures.push_back(fmt::format("halfnormal n={} r={}: |w1 - gap| = {:.3g} exceeds {:.0e}", row.n,
                                               format_real(row.r), std::fabs(row.w1_quadrature - row.gap_exact),
                                               kIdentityTolerance));
        }
    }
    out.tables.emplace_back("halfnormal_curves.csv", std::move(curves));
    out.tables.emplace_back("halfnormal_summary.csv", std::move(summary));
    return out;
}

// ---------------------------------------------------------------------------
// clustered

CommandOutput clustered(const ClusteredParams& params, const RunContext& /*ctx*/) {
    require(!params.m.empty(), "clustered: m list must be non-empty");
    const auto ms = sorted_unique(params.m);

    CommandOutput out;
    out.parameters["mode"] = params.b ? "fixed-b" : "fixed-n";
    if (params.b) {
        out.parameters["b"] = *params.b;
    } else {
        out.parameters["n"] = params.n;
    }
    out.parameters["m"] = ms;
    out.parameters["gamma"] = params.gamma;

    CsvTable table({"n", "m", "b", "k", "k_eff", "rho_cl", "rho_counting", "mean_gap"});
    for (const long m : ms) {
        require(m >= 1, "clustered: m must be >= 1");
        long n = 0;
        long b = 0;
        if (params.b) {
            b = *params.b;
            require(b >= 1, "clustered: b must be >= 1");
            n = m * b;
        } else {
            n = params.n;
            require(n >= 1 && n % m == 0, fmt::format("clustered: m = {} does not divide n = {}", m, n));
            b = n / m;
        }
        const long k = checked_index(n, params.gamma);
        const auto law = clustered_law(k, m, b);
        const double rho = clustered_radius(k, m, b);
        const double rho_counting = counting_tail_w1(perfect_cluster_count_tail(k, m, b), n, k);
        const double gap = mean_gap(*law, *beta_reference(n, k));
        table.add_row({n, m, b, k, law->k(), rho, rho_counting, gap});
        if (gap > rho + 1e-9) {
            out.failures.push_back(fmt::format("clustered m={} b={}: mean gap {:.6g} exceeds rho_cl {:.6g}", m, b, gap, rho));
        }
        if (std::fabs(rho - rho_counting) > 1e-8) {
            out.failures.push_back(fmt::format("clustered m={} b={}: closed form {:.10g} and counting formula {:.10g} disagree",
                                               m, b, rho, rho_counting));
        }
    }
    out.tables.emplace_back("clustered.csv", std::move(table));
    return out;
}

// ---------------------------------------------------------------------------
// ar1

namespace {

using Ar1Key = std::tuple<long, double, long>;   // n, a, ell

struct Ar1Result {
    BoundChainRow chain;
    BadCalibrationRow bad;
    std::vector<double> curve;   // empirical cdf on the t grid
};

std::vector<Cell> chain_cells(const BoundChainRow& row) {
    return {row.config.n,        row.config.a,         row.config.ell,          row.config.gamma,
            row.k,               row.config.sims,      row.mc_mean,             row.mc_gap,
            row.mc_gap_se,       row.mc_w1,            row.mc_w1_se,            row.radius.delta_term,
            row.radius.floor_term, row.analytic_bound, row.combined_se,         row.chain_holds};
}

const std::vector<std::string> kChainColumns = {
    "n",     "a",        "ell",        "gamma",      "k",          "sims",           "mc_mean",     "mc_gap",
    "mc_gap_se", "mc_w1", "mc_w1_se",  "delta_term", "floor_term", "analytic_bound", "combined_se", "chain_holds"};

} // namespace

CommandOutput ar1(const Ar1Params& params, const RunContext& ctx) {
    require(!params.a.empty() && !params.ell.empty() && !params.chain_n.empty(), "ar1: a, ell and n lists must be non-empty");
    require(params.eta > 0.0 && params.eta < params.gamma, "ar1: eta must lie in (0, gamma)");
    const double epsilon = params.epsilon.value_or(0.5 * params.eta);
    require(epsilon > 0.0 && epsilon < 1.0, "ar1: epsilon must lie in (0, 1)");
    std::vector<double> epsilon_grid;
    for (int j = 1; j <= 100; ++j) epsilon_grid.push_back(0.0025 * j);
    const auto as = sorted_unique(params.a);
    const auto ells = sorted_unique(params.ell);
    const auto chain_ns = sorted_unique(params.chain_n);
    const auto bound_ells = sorted_unique(params.bound_ell);
    const auto bad_ns = sorted_unique(params.bad_n);
    const auto bad_ells = sorted_unique(params.bad_ell);
    const auto ts = unit_grid(params.curve_points);

    CommandOutput out;
    out.parameters["a"] = as;
    out.parameters["ell"] = ells;
    out.parameters["n"] = chain_ns;
    out.parameters["curve_n"] = params.curve_n;
    out.parameters["bound_n"] = params.bound_n;
    out.parameters["bound_ell"] = bound_ells;
    out.parameters["bad_n"] = bad_ns;
    out.parameters["bad_ell"] = bad_ells;
    out.parameters["gamma"] = params.gamma;
    out.parameters["eta"] = params.eta;
    out.parameters["epsilon"] = epsilon;
    out.parameters["curve_points"] = params.curve_points;

    std::vector<Ar1Key> curve_keys, bound_keys, chain_keys, bad_keys;
    for (const double a : as) {
        for (const long ell : ells) curve_keys.emplace_back(params.curve_n, a, ell);
        for (const long ell : bound_ells) bound_keys.emplace_back(params.bound_n, a, ell);
        for (const long n : chain_ns) {
            for (const long ell : ells) chain_keys.emplace_back(n, a, ell);
        }
        for (const long n : bad_ns) {
            for (const long ell : bad_ells) bad_keys.emplace_back(n, a, ell);
        }
    }
    for (auto* keys : {&curve_keys, &bound_keys, &chain_keys, &bad_keys}) *keys = sorted_unique(*keys);

    std::vector<Ar1Key> all;
    for (const auto* keys : {&curve_keys, &bound_keys, &chain_keys, &bad_keys}) all.insert(all.end(), keys->begin(), keys->end());
    all = sorted_unique(all);

    std::vector<Ar1Config> configs;
    for (const auto& [n, a, ell] : all) {
        Ar1Config c;
        c.n = n;
        c.a = a;
        c.ell = ell;
        c.gamma = params.gamma;
        c.sims = ctx.sims;
        c.master_seed = ctx.seed;
        c.validate();
        checked_index(n, params.gamma);
        configs.push_back(c);
    }

    std::vector<Ar1Result> results(configs.size());
    parallel_for(configs.size(), ctx.threads, [&](std::size_t i) {
        const Ar1Config& config = configs[i];
        const std::vector<double> sample = simulate_realized_coverage(config, 1);
        Ar1Result& result = results[i];
        result.chain = bound_chain_from_sample(config, sample);
        result.bad = bad_calibration_from_sample(config, params.eta, sample,
                                                 {result.chain.mc_w1, result.chain.mc_w1_se});
        std::vector<double> sorted(sample);
        std::sort(sorted.begin(), sorted.end());
        result.curve.reserve(ts.size());
        for (const double t : ts) result.curve.push_back(fraction_at_most(sorted, t));
    });
    const auto result_for = [&](const Ar1Key& key) -> const Ar1Result& {
        return results[static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), key) - all.begin())];
    };

    CsvTable cdfs({"n", "a", "ell", "t", "F_empirical", "F_beta"});
    for (const auto& key : curve_keys) {
        const auto& [n, a, ell] = key;
        const auto reference = beta_reference(n, conformal_index(n, params.gamma));
        const auto& curve = result_for(key).curve;
        for (std::size_t j = 0; j < ts.size(); ++j) cdfs.add_row({n, a, ell, ts[j], curve[j], reference->cdf(ts[j])});
    }

    const auto chain_table = [&](const std::vector<Ar1Key>& keys, const char* label) {
        CsvTable table(kChainColumns);
        for (const auto& key : keys) {
            const BoundChainRow& row = result_for(key).chain;
            table.add_row(chain_cells(row));
            if (!row.chain_holds) {
                out.failures.push_back(fmt::format("ar1 {} n={} a={} ell={}: mc_gap {:.6g} > mc_w1 {:.6g} + 3 se {:.3g}",
                                                   label, row.config.n, format_real(row.config.a), row.config.ell,
                                                   row.mc_gap, row.mc_w1, row.combined_se));
            }
        }
        return table;
    };
    CsvTable bound = chain_table(bound_keys, "bound");
    CsvTable chain = chain_table(chain_keys, "chain");

    CsvTable bad({"n", "a", "ell", "gamma", "k", "sims", "eta", "threshold", "mc_tail", "mc_tail_se", "beta_tail",
                  "mc_w1", "mc_w1_se", "bound_raw", "bound", "combined_se", "holds", "epsilon", "bound_eps_raw",
                  "epsilon_min", "bound_min_raw"});
    for (const auto& key : bad_keys) {
        const BadCalibrationRow& row = result_for(key).bad;
        const BadCalibrationBound at_eps =
            bad_calibration_markov(row.mc_w1, 1.0, row.threshold, epsilon, row.config.n, row.k);
        const BadCalibrationBound best =
            bad_calibration_markov_minimized(row.mc_w1, 1.0, row.threshold, row.config.n, row.k, epsilon_grid);
        bad.add_row({row.config.n, row.config.a, row.config.ell, row.config.gamma, row.k, row.config.sims, row.eta,
                     row.threshold, row.mc_tail, row.mc_tail_se, row.beta_tail, row.mc_w1, row.mc_w1_se, row.bound_raw,
                     row.bound, row.combined_se, row.holds, epsilon, at_eps.raw_total, best.epsilon, best.raw_total});
        if (!row.holds) {
            out.failures.push_back(fmt::format("ar1 bad-calibration n={} a={} ell={}: mc_tail {:.6g} > bound {:.6g} + 3 se {:.3g}",
                                               row.config.n, format_real(row.config.a), row.config.ell, row.mc_tail,
                                               row.bound_raw, row.combined_se));
        }
    }

    out.tables.emplace_back("ar1_cdfs.csv", std::move(cdfs));
    out.tables.emplace_back("ar1_bound.csv", std::move(bound));
    out.tables.emplace_back("ar1_chain.csv", std::move(chain));
    out.tables.emplace_back("ar1_bad_calibration.csv", std::move(bad));
    return out;
}

} // namespace betacov::cli
