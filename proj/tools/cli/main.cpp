// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace riskbid::cli;

    CLI::App app{"Equilibrium bids and safety comparisons for first-, second- and uniform-price auctions"};
    app.require_subcommand(1);

    std::string config, out_dir = ".";
    std::uint64_t rounds = 100000, seed = 0;

    auto* solve = app.add_subcommand("solve", "Solve the symmetric equilibrium of a scenario");
    solve->add_option("--config", config, "Scenario JSON")->required();
    solve->add_option("--out", out_dir, "Output directory");

    auto* compare = app.add_subcommand("compare", "Solve with and without the transform and check the ordering");
    compare->add_option("--config", config, "Scenario JSON with a transform")->required();
    compare->add_option("--out", out_dir, "Output directory");

    auto* safety = app.add_subcommand("safety", "Compare two bids on a finite state space");
    safety->add_option("--config", config, "Problem JSON")->required();

    auto* audit = app.add_subcommand("audit", "Best-response audit of a solved scenario");
    audit->add_option("--config", config, "Scenario JSON (or the solve's meta.json)")->required();
    audit->add_option("--out", out_dir, "Directory holding solution.csv");
    auto* audit_seed = audit->add_option("--seed", seed, "Seed recorded in the report");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo auctions under the solved bids");
    simulate->add_option("--config", config, "Scenario JSON (or the solve's meta.json)")->required();
    simulate->add_option("--out", out_dir, "Directory holding solution.csv");
    simulate->add_option("--rounds", rounds, "Number of auction rounds");
    auto* sim_seed = simulate->add_option("--seed", seed, "Master seed (defaults to the config seed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(kInputFailure);
    }

    auto maybe_seed = [&](CLI::Option* opt) {
        return opt->count() > 0 ? std::optional<std::uint64_t>(seed) : std::nullopt;
    };
    if (*solve) return cmd_solve(config, out_dir, std::cout, std::cerr);
    if (*compare) return cmd_compare(config, out_dir, std::cout, std::cerr);
    if (*safety) return cmd_safety(config, std::cout, std::cerr);
    if (*audit) return cmd_audit(config, out_dir, maybe_seed(audit_seed), std::cout, std::cerr);
    if (*simulate) return cmd_simulate(config, out_dir, rounds, maybe_seed(sim_seed), std::cout, std::cerr);
    return static_cast<int>(kInputFailure);
}
