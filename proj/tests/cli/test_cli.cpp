#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "betacov_cli/app.hpp"
#include "betacov_cli/csv.hpp"
#include "betacov_cli/manifest.hpp"

namespace fs = std::filesystem;
using namespace betacov::cli;

namespace {

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("betacov_cli_") + info->name());
        fs::remove_all(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path dir(const std::string& sub = "") const { return sub.empty() ? dir_ : dir_ / sub; }

private:
    fs::path dir_;
};

} // namespace

TEST(CliUsage, HelpSucceeds) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("halfnormal"), std::string::npos);
}

TEST(CliUsage, MissingOrUnknownSubcommand) {
    EXPECT_EQ(invoke({}).code, kExitUsage);
    EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
}

TEST(CliUsage, DefaultsConflictsWithGridFlags) {
    const auto r = invoke({"--defaults", "clustered", "--m", "2"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("--defaults"), std::string::npos);
}

TEST(CliUsage, OutOfDomainParameters) {
    EXPECT_EQ(invoke({"beta-tail", "--gamma", "1.5"}).code, kExitUsage);
    EXPECT_EQ(invoke({"--sims", "0", "beta-tail"}).code, kExitUsage);
    EXPECT_EQ(invoke({"ar1", "--a", "1.0"}).code, kExitUsage);
}

TEST_F(CliTest, DegenerateIndexHasDedicatedExitCode) {
    const auto r = invoke({"--out-dir", dir().string(), "--sims", "100", "beta-tail", "--n", "10", "--gamma", "0.95"});
    EXPECT_EQ(r.code, kExitDegenerate);
    EXPECT_NE(r.err.find("degenerate"), std::string::npos);
}

TEST_F(CliTest, ManifestRecordsOutputDigests) {
    const auto r = invoke({"--out-dir", dir().string(), "clustered"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto manifest = RunManifest::from_json(nlohmann::ordered_json::parse(slurp(dir("clustered.manifest.json"))));
    EXPECT_EQ(manifest.command, "clustered");
    EXPECT_EQ(manifest.master_seed, 20250101u);
    ASSERT_EQ(manifest.outputs.size(), 1u);
    const std::string csv = slurp(dir(manifest.outputs[0].file));
    EXPECT_EQ(manifest.outputs[0].bytes, csv.size());
    EXPECT_EQ(manifest.outputs[0].sha256, sha256_hex(csv));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,m,b,k,k_eff,rho_cl,rho_counting,mean_gap");
}

TEST_F(CliTest, OutputIndependentOfThreadCount) {
    const std::vector<std::string> tail{"--sims", "3000", "beta-tail", "--n", "20,50"};
    std::vector<std::string> one{"--threads", "1", "--out-dir", dir("one").string()};
    std::vector<std::string> many{"--threads", "4", "--out-dir", dir("many").string()};
    one.insert(one.end(), tail.begin(), tail.end());
    many.insert(many.end(), tail.begin(), tail.end());
    ASSERT_EQ(invoke(one).code, kExitOk);
    ASSERT_EQ(invoke(many).code, kExitOk);
    EXPECT_EQ(slurp(dir("one") / "beta_tail.csv"), slurp(dir("many") / "beta_tail.csv"));
}

TEST_F(CliTest, SeedChangesMonteCarloColumns) {
    ASSERT_EQ(invoke({"--seed", "1", "--sims", "2000", "--out-dir", dir("a").string(), "beta-tail", "--n", "30"}).code,
              kExitOk);
    ASSERT_EQ(invoke({"--seed", "2", "--sims", "2000", "--out-dir", dir("b").string(), "beta-tail", "--n", "30"}).code,
              kExitOk);
    EXPECT_NE(slurp(dir("a") / "beta_tail.csv"), slurp(dir("b") / "beta_tail.csv"));
}

TEST_F(CliTest, ReplayReproducesOutputs) {
    ASSERT_EQ(invoke({"--sims", "2000", "--out-dir", dir("first").string(), "ar1", "--a", "0.6", "--ell", "1", "--n",
                      "50", "--bound-ell", "1,5", "--bad-n", "50", "--bad-ell", "5", "--curve-points", "11"})
                  .code,
              kExitOk);
    const auto replay =
        invoke({"--out-dir", dir("second").string(), "replay", dir("first/ar1.manifest.json").string()});
    ASSERT_EQ(replay.code, kExitOk) << replay.err;
    for (const char* name : {"ar1_cdfs.csv", "ar1_chain.csv", "ar1_bound.csv", "ar1_bad_calibration.csv"}) {
        EXPECT_EQ(slurp(dir("first") / name), slurp(dir("second") / name)) << name;
    }
}

TEST_F(CliTest, HalfnormalSmallGrid) {
    const auto r = invoke({"--sims", "2000", "--out-dir", dir().string(), "halfnormal", "--n", "50", "--r", "0.5,2",
                           "--summary-r", "1.1", "--curve-points", "5"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::string curves = slurp(dir("halfnormal_curves.csv"));
    EXPECT_EQ(std::count(curves.begin(), curves.end(), '\n'), 1 + 2 * 5);
    const std::string summary = slurp(dir("halfnormal_summary.csv"));
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1 + 3);
}

TEST_F(CliTest, W1BallGridShape) {
    const auto r = invoke({"--out-dir", dir().string(), "w1-ball", "--pi-points", "3", "--c-points", "4"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const std::string csv = slurp(dir("w1_ball.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,k,pi,c,w1");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 12);
}

TEST(Csv, FormattingAndWidthCheck) {
    CsvTable table({"a", "b", "c", "d"});
    table.add_row({Cell{3L}, Cell{0.1}, Cell{true}, Cell{std::string("x")}});
    table.add_row({Cell{-0L}, Cell{-0.0}, Cell{false}, Cell{std::string("")}});
    EXPECT_EQ(table.render(), "a,b,c,d\n3,0.1,true,x\n0,0,false,\n");
    EXPECT_THROW(table.add_row({Cell{1L}}), std::exception);
    EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333333");
}

TEST(Manifest, JsonRoundTrip) {
    RunManifest m;
    m.command = "w1-ball";
    m.parameters["n"] = 50;
    m.argv = {"w1-ball"};
    m.master_seed = 42;
    m.sims = 10;
    m.threads = 2;
    m.tool_version = "0.1.0";
    m.outputs.push_back({"w1_ball.csv", 12, sha256_hex("abc")});
    const auto back = RunManifest::from_json(m.to_json());
    EXPECT_EQ(back.to_json(), m.to_json());
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
