#include "betacov_cli/app.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "betacov/error.hpp"
#include "betacov_cli/commands.hpp"
#include "betacov_cli/manifest.hpp"

#ifndef BETACOV_VERSION
#define BETACOV_VERSION "unknown"
#endif

namespace betacov::cli {

namespace {

struct GlobalOptions {
    std::uint64_t seed = kDefaultSeed;
    long sims = kDefaultSims;
    std::string out_dir = ".";
    bool defaults = false;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> strip_out_dir(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out-dir") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out-dir=", 0) == 0) continue;
        kept.push_back(args[i]);
    }
    return kept;
}

int emit(const std::string& command, CommandOutput output, const GlobalOptions& g, const std::vector<std::string>& args,
         double seconds, std::ostream& out, std::ostream& err) {
    RunManifest manifest;
    manifest.command = command;
    manifest.parameters = std::move(output.parameters);
    manifest.argv = args;
    manifest.master_seed = g.seed;
    manifest.sims = g.sims;
    manifest.threads = g.threads;
    manifest.tool_version = BETACOV_VERSION;
    manifest.wall_time_seconds = seconds;
    for (const auto& [name, table] : output.tables) {
        manifest.outputs.push_back(write_output(g.out_dir, name, table.render()));
        fmt::print(out, "wrote {} ({} rows)\n", (std::filesystem::path(g.out_dir) / name).string(), table.rows());
    }
    std::string stem = command;
    std::replace(stem.begin(), stem.end(), '-', '_');
    const std::string manifest_name = stem + ".manifest.json";
    write_output(g.out_dir, manifest_name, manifest.to_json().dump(2) + "\n");
    fmt::print(out, "wrote {}\n", (std::filesystem::path(g.out_dir) / manifest_name).string());

    for (const auto& failure : output.failures) fmt::print(err, "assertion failed: {}\n", failure);
    return output.failures.empty() ? kExitOk : kExitAssertion;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Calibration-conditional coverage: beta reference laws and Wasserstein bounds", "betacov"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Master seed for every Monte Carlo stream")->capture_default_str();
    app.add_option("--sims", g.sims, "Monte Carlo replications")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Directory for CSV and manifest output")->capture_default_str();
    app.add_flag("--defaults", g.defaults, "Use the default parameter grids (rejects grid flags)");
    app.add_option("--threads", g.threads, "Worker threads (output does not depend on this)")
        ->check(CLI::Range(1, 4096))
        ->capture_default_str();

    std::vector<CLI::Option*> grid_flags;
    const auto grid = [&grid_flags](CLI::Option* opt) {
        grid_flags.push_back(opt);
        return opt;
    };

    BetaTailParams beta;
    auto* beta_cmd = app.add_subcommand("beta-tail", "Lower-tail probabilities of the beta reference law, with MC check");
    grid(beta_cmd->add_option("--n", beta.n, "Calibration sizes")->delimiter(',')->capture_default_str());
    grid(beta_cmd->add_option("--gamma", beta.gamma, "Nominal level")->capture_default_str());
    grid(beta_cmd->add_option("--t", beta.thresholds, "Coverage thresholds")->delimiter(',')->capture_default_str());

    W1BallParams ball;
    long ball_k = 0;
    int pi_points = 51;
    int c_points = 51;
    auto* ball_cmd = app.add_subcommand("w1-ball", "W1 radius of contaminated beta laws on a (pi, c) grid");
    grid(ball_cmd->add_option("--n", ball.n, "Calibration size")->capture_default_str());
    grid(ball_cmd->add_option("--gamma", ball.gamma, "Nominal level")->capture_default_str());
    auto* ball_k_opt = grid(ball_cmd->add_option("--k", ball_k, "Threshold index (default k_gamma)"));
    grid(ball_cmd->add_option("--pi-points", pi_points, "Points of the pi grid on [0,1]")->check(CLI::Range(2, 100000))->capture_default_str());
    grid(ball_cmd->add_option("--c-points", c_points, "Points of the c grid on [0,1]")->check(CLI::Range(2, 100000))->capture_default_str());

    HalfnormalParams half;
    auto* half_cmd = app.add_subcommand("halfnormal", "Half-normal scale shift: transported cdfs and W1 identity");
    grid(half_cmd->add_option("--n", half.n, "Calibration sizes")->delimiter(',')->capture_default_str());
    grid(half_cmd->add_option("--gamma", half.gamma, "Nominal level")->capture_default_str());
    grid(half_cmd->add_option("--r", half.r, "Scale ratios for cdf curves")->delimiter(',')->capture_default_str());
    grid(half_cmd->add_option("--summary-r", half.summary_r, "Additional scale ratios for the summary")->delimiter(','));
    grid(half_cmd->add_option("--curve-points", half.curve_points, "Points of the t grid")->capture_default_str());

    ClusteredParams clus;
    long clus_b = 0;
    auto* clus_cmd = app.add_subcommand("clustered", "Perfect-cluster effective sample size radius");
    auto* clus_n_opt = grid(clus_cmd->add_option("--n", clus.n, "Fixed total size (b = n/m)")->capture_default_str());
    auto* clus_b_opt = grid(clus_cmd->add_option("--b", clus_b, "Fixed cluster count (n = m b)"));
    clus_b_opt->excludes(clus_n_opt);
    grid(clus_cmd->add_option("--m", clus.m, "Cluster sizes")->delimiter(',')->capture_default_str());
    grid(clus_cmd->add_option("--gamma", clus.gamma, "Nominal level")->capture_default_str());

    Ar1Params ar;
    auto* ar_cmd = app.add_subcommand("ar1", "Stationary AR(1) calibration: cdfs, bound chain, bad calibration");
    grid(ar_cmd->add_option("--a", ar.a, "Autoregressive coefficients")->delimiter(',')->capture_default_str());
    grid(ar_cmd->add_option("--ell", ar.ell, "Test horizons (cdf and chain)")->delimiter(',')->capture_default_str());
    grid(ar_cmd->add_option("--n", ar.chain_n, "Calibration sizes for the chain")->delimiter(',')->capture_default_str());
    grid(ar_cmd->add_option("--curve-n", ar.curve_n, "Calibration size for cdf curves")->capture_default_str());
    grid(ar_cmd->add_option("--bound-n", ar.bound_n, "Calibration size for the bound-vs-ell sweep")->capture_default_str());
    grid(ar_cmd->add_option("--bound-ell", ar.bound_ell, "Horizons for the bound-vs-ell sweep")->delimiter(',')->capture_default_str());
    grid(ar_cmd->add_option("--bad-n", ar.bad_n, "Calibration sizes for bad calibration")->delimiter(',')->capture_default_str());
    grid(ar_cmd->add_option("--bad-ell", ar.bad_ell, "Horizons for bad calibration")->delimiter(',')->capture_default_str());
    grid(ar_cmd->add_option("--gamma", ar.gamma, "Nominal level")->capture_default_str());
    grid(ar_cmd->add_option("--eta", ar.eta, "Bad-calibration margin")->capture_default_str());
    grid(ar_cmd->add_option("--epsilon", ar.epsilon, "Markov slack for the extra bound column (default eta/2)"));
    grid(ar_cmd->add_option("--curve-points", ar.curve_points, "Points of the t grid")->capture_default_str());

    std::string manifest_path;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay_cmd->add_option("manifest", manifest_path, "Manifest JSON file")->required()->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (g.defaults) {
        for (const auto* opt : grid_flags) {
            if (opt->count() > 0) throw UsageError("--defaults cannot be combined with " + opt->get_name());
        }
    }

    if (replay_cmd->parsed()) {
        std::ifstream in(manifest_path);
        const RunManifest recorded = RunManifest::from_json(nlohmann::ordered_json::parse(in));
        std::vector<std::string> rerun = strip_out_dir(recorded.argv);
        rerun.push_back("--out-dir");
        rerun.push_back(g.out_dir);
        return dispatch(rerun, out, err);
    }

    const RunContext ctx{g.seed, g.sims, g.threads};
    const auto start = std::chrono::steady_clock::now();
    std::string command;
    CommandOutput output;
    if (beta_cmd->parsed()) {
        command = "beta-tail";
        output = beta_tail(beta, ctx);
    } else if (ball_cmd->parsed()) {
        command = "w1-ball";
        if (ball_k_opt->count() > 0) ball.k = ball_k;
        ball.pi = linear_grid(0.0, 1.0, pi_points);
        ball.c = linear_grid(0.0, 1.0, c_points);
        output = w1_ball(ball, ctx);
    } else if (half_cmd->parsed()) {
        command = "halfnormal";
        output = halfnormal(half, ctx);
    } else if (clus_cmd->parsed()) {
        command = "clustered";
        if (clus_b_opt->count() > 0) clus.b = clus_b;
        output = clustered(clus, ctx);
    } else {
        command = "ar1";
        output = ar1(ar, ctx);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return emit(command, std::move(output), g, args, seconds, out, err);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const UsageError& e) {
        fmt::print(err, "usage error: {}\n", e.what());
        return kExitUsage;
    } catch (const DegenerateCoverage& e) {
        fmt::print(err, "degenerate coverage: {}\n", e.what());
        return kExitDegenerate;
    } catch (const DomainError& e) {
        fmt::print(err, "invalid parameters: {}\n", e.what());
        return kExitUsage;
    } catch (const IdentityViolation& e) {
        fmt::print(err, "assertion failed: {}\n", e.what());
        return kExitAssertion;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitRuntime;
    }
}

} // namespace betacov::cli
