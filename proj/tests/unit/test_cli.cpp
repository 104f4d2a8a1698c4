// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "commands.hpp"

using namespace riskbid;
using namespace riskbid::cli;

namespace {

const fs::path kConfigs = RISKBID_CONFIG_DIR;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("riskbid-cli-" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    int solve(const fs::path& cfg, const fs::path& out) { return cmd_solve(cfg, out, out_, err_); }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, SolveWritesSolutionAndMeta) {
    ASSERT_EQ(solve(kConfigs / "fpa_uniform_linear.json", dir_ / "run"), kOk) << err_.str();
    const auto csv = slurp(dir_ / "run" / "solution.csv");
    EXPECT_EQ(csv.rfind("v,beta,foc_residual\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 258);
    const auto meta = json::parse(slurp(dir_ / "run" / "meta.json"));
    const auto& cfg = meta.at("config");
    EXPECT_EQ(cfg.at("K"), 1);
    EXPECT_EQ(cfg.at("boundary_bid"), 0.0);
    EXPECT_EQ(cfg.at("tolerances").at("ode_tol"), 1e-8);
    EXPECT_EQ(cfg.at("audit").at("deviations"), 512);
    EXPECT_TRUE(meta.at("diagnostics").at("monotone").get<bool>());
}

TEST_F(CliTest, MetaReproducesSolutionBitForBit) {
    for (const char* name : {"fpa_mixture_affine.json", "spa_noise_cara.json", "uniform_k2_noise.json"}) {
        ASSERT_EQ(solve(kConfigs / name, dir_ / "a"), kOk) << name << err_.str();
        ASSERT_EQ(solve(dir_ / "a" / "meta.json", dir_ / "b"), kOk) << name << err_.str();
        EXPECT_EQ(slurp(dir_ / "a" / "solution.csv"), slurp(dir_ / "b" / "solution.csv")) << name;
        const auto meta_a = json::parse(slurp(dir_ / "a" / "meta.json"));
        const auto meta_b = json::parse(slurp(dir_ / "b" / "meta.json"));
        EXPECT_EQ(meta_a.at("config"), meta_b.at("config")) << name;
    }
    EXPECT_EQ(json::parse(slurp(dir_ / "a" / "meta.json")).at("K"), 2);
}

TEST_F(CliTest, ShippedConfigsSolveAndAudit) {
    for (const char* name : {"fpa_uniform_linear.json", "fpa_crra_compare.json", "fpa_mixture_affine.json",
                             "spa_vickrey.json", "spa_noise_cara.json", "uniform_k2_noise.json"}) {
        const auto out = dir_ / name;
        ASSERT_EQ(solve(kConfigs / name, out), kOk) << name << err_.str();
        EXPECT_EQ(cmd_audit(kConfigs / name, out, std::nullopt, out_, err_), kOk) << name << err_.str();
        const auto audit = json::parse(slurp(out / "audit.json"));
        EXPECT_LE(audit.at("max_gain").get<double>(), 1e-6) << name;
    }
}

TEST_F(CliTest, InputErrorsExitThree) {
    const auto k_eq_n = write("k.json", R"({"format": "uniform", "values": {"lo": 0, "hi": 1, "n": 3}, "K": 3})");
    EXPECT_EQ(solve(k_eq_n, dir_ / "o"), kInputFailure);
    const auto unknown = write("u.json", R"({"format": "fpa", "values": {"lo": 0, "hi": 1, "n": 2}, "gird": 100})");
    EXPECT_EQ(solve(unknown, dir_ / "o"), kInputFailure);
    EXPECT_NE(err_.str().find("gird"), std::string::npos);
    const auto nested = write("n.json", R"({"format": "fpa", "values": {"lo": 0, "hi": 1, "n": 2, "mu": 1}})");
    EXPECT_EQ(solve(nested, dir_ / "o"), kInputFailure);
    const auto garbage = write("g.json", "{not json");
    EXPECT_EQ(solve(garbage, dir_ / "o"), kInputFailure);
    EXPECT_EQ(solve(dir_ / "missing.json", dir_ / "o"), kInputFailure);
    const auto wrong_format_key =
        write("w.json", R"({"format": "fpa", "values": {"lo": 0, "hi": 1, "n": 2}, "win_payoff": {"form": "deterministic"}})");
    EXPECT_EQ(solve(wrong_format_key, dir_ / "o"), kInputFailure);
}

TEST_F(CliTest, DomainBreachExitsTwo) {
    const auto cfg = write("c.json", R"({"format": "fpa", "values": {"lo": 0, "hi": 1, "n": 2},
        "utility": {"family": "crra", "rho": 1.5}})");
    EXPECT_EQ(solve(cfg, dir_ / "o"), kSolverFailure);
    EXPECT_NE(err_.str().find("DomainError"), std::string::npos);
}

TEST_F(CliTest, CompareWritesVerdict) {
    ASSERT_EQ(cmd_compare(kConfigs / "fpa_crra_compare.json", dir_ / "f", out_, err_), kOk) << err_.str();
    auto verdict = json::parse(slurp(dir_ / "f" / "verdict.json"));
    EXPECT_TRUE(verdict.at("ordering_holds").get<bool>());
    EXPECT_GE(verdict.at("min_d").get<double>(), -1e-7);
    EXPECT_EQ(slurp(dir_ / "f" / "comparison.csv").rfind("v,beta,beta_hat,d\n", 0), 0u);

    ASSERT_EQ(cmd_compare(kConfigs / "spa_noise_cara.json", dir_ / "s", out_, err_), kOk) << err_.str();
    verdict = json::parse(slurp(dir_ / "s" / "verdict.json"));
    EXPECT_LE(verdict.at("max_d").get<double>(), 1e-7);
    EXPECT_TRUE(verdict.at("one_sided_holds").get<bool>());

    const auto linear = write("l.json", R"({"format": "fpa", "values": {"lo": 0, "hi": 1, "n": 3},
        "utility": {"family": "cara", "alpha": 1}, "transform": {"family": "linear"}})");
    ASSERT_EQ(cmd_compare(linear, dir_ / "l", out_, err_), kOk);
    verdict = json::parse(slurp(dir_ / "l" / "verdict.json"));
    EXPECT_LE(std::abs(verdict.at("min_d").get<double>()), 1e-10);

    EXPECT_EQ(cmd_compare(kConfigs / "fpa_uniform_linear.json", dir_ / "x", out_, err_), kInputFailure);
}

TEST_F(CliTest, SafetyVerdicts) {
    std::ostringstream out;
    ASSERT_EQ(cmd_safety(kConfigs / "safety_known_values.json", out, err_), kOk);
    auto j = json::parse(out.str());
    EXPECT_TRUE(j.at("fpa").at("higher_bid_safer").get<bool>());
    EXPECT_TRUE(j.at("fpa").at("winning_cannot_hurt").get<bool>());
    EXPECT_TRUE(j.at("fpa").at("low_bids_better_winners").get<bool>());
    EXPECT_FALSE(j.contains("spa"));

    out.str("");
    ASSERT_EQ(cmd_safety(kConfigs / "safety_known_outside.json", out, err_), kOk);
    j = json::parse(out.str());
    EXPECT_TRUE(j.at("spa").at("lower_bid_safer").get<bool>());
    EXPECT_TRUE(j.at("spa").at("known_outside").get<bool>());

    const auto dominated = write("d.json", R"({"states": [{"gamma": 0.5, "value": 1.0, "outside": 0.0,
        "tie_high": false, "tie_low": false}], "bid_a": 0.8, "bid_b": 0.4, "format": "fpa"})");
    EXPECT_EQ(cmd_safety(dominated, out, err_), kDominated);
    const auto bad_order = write("b.json", R"({"states": [{"gamma": 0.5, "value": 1.0, "outside": 0.0,
        "tie_high": false, "tie_low": false}], "bid_a": 0.4, "bid_b": 0.8})");
    EXPECT_EQ(cmd_safety(bad_order, out, err_), kInputFailure);
    const auto extra = write("e.json", R"({"states": [], "bid_a": 0.8, "bid_b": 0.4, "colour": 1})");
    EXPECT_EQ(cmd_safety(extra, out, err_), kInputFailure);
}

TEST_F(CliTest, CorruptedSolutionFailsAudit) {
    const auto cfg = kConfigs / "fpa_uniform_linear.json";
    ASSERT_EQ(solve(cfg, dir_), kOk);
    ASSERT_EQ(cmd_audit(cfg, dir_, 5, out_, err_), kOk);
    EXPECT_EQ(json::parse(slurp(dir_ / "audit.json")).at("seed"), 5);

    const auto sol = read_solution(dir_ / "solution.csv", std::make_pair(0.0, 0.0));
    std::ostringstream csv;
    csv << std::setprecision(17) << "v,beta,foc_residual\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i) csv << sol.grid[i] << ',' << 1.1 * sol.bids[i] << ",0\n";
    write_atomic(dir_ / "solution.csv", csv.str());
    EXPECT_EQ(cmd_audit(cfg, dir_, std::nullopt, out_, err_), kAuditFailure);
    EXPECT_GT(json::parse(slurp(dir_ / "audit.json")).at("max_gain").get<double>(), 1e-3);

    write_atomic(dir_ / "solution.csv", "v,bid\n0,0\n");
    EXPECT_EQ(cmd_audit(cfg, dir_, std::nullopt, out_, err_), kInputFailure);
}

TEST_F(CliTest, SimulateIsReproducible) {
    const auto cfg = kConfigs / "fpa_uniform_linear.json";
    ASSERT_EQ(solve(cfg, dir_), kOk);
    ASSERT_EQ(cmd_simulate(cfg, dir_, 0, std::nullopt, out_, err_), kOk);
    auto stats = json::parse(slurp(dir_ / "stats.json"));
    EXPECT_EQ(stats.at("rounds"), 0);
    EXPECT_EQ(stats.at("mean_revenue"), 0.0);

    ASSERT_EQ(cmd_simulate(cfg, dir_, 100000, 11, out_, err_), kOk);
    const auto first = slurp(dir_ / "stats.json");
    ASSERT_EQ(cmd_simulate(cfg, dir_, 100000, 11, out_, err_), kOk);
    EXPECT_EQ(first, slurp(dir_ / "stats.json"));
    stats = json::parse(first);
    EXPECT_NEAR(stats.at("mean_revenue").get<double>(), 1.0 / 3.0, 3.0 * stats.at("se_revenue").get<double>());
}

TEST_F(CliTest, WriteAtomicLeavesNoTempFiles) {
    write_atomic(dir_ / "x.txt", "hello");
    write_atomic(dir_ / "x.txt", "world");
    EXPECT_EQ(slurp(dir_ / "x.txt"), "world");
    EXPECT_EQ(std::distance(fs::directory_iterator(dir_), fs::directory_iterator{}), 1);
}

TEST(CliSerialization, VerdictReportsViolation) {
    // Valid scenarios cannot break the ordering, so exit 4 is exercised through
    // the report a violation carries.
    ComparisonReport r;
    r.format = "spa";
    r.max_d = 1e-3;
    r.tolerance = 1e-9;
    r.ordering_holds = false;
    r.one_sided_holds = false;
    r.diagnostics = {-1.0, 2e-4};
    const auto j = verdict_json(OrderingViolation(r, "max d").report());
    EXPECT_FALSE(j.at("ordering_holds").get<bool>());
    EXPECT_EQ(j.at("max_d"), 1e-3);
    EXPECT_EQ(j.at("max_one_sided_gap"), 2e-4);
    EXPECT_FALSE(j.contains("min_d"));
    EXPECT_EQ(kOrderingFailure, 4);
}
