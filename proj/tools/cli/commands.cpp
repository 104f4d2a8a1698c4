// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace riskbid::cli {
namespace {

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const OrderingViolation& e) {
        err << "ordering violation: " << e.what() << '\n';
        return kOrderingFailure;
    } catch (const DominancePrecondition& e) {
        err << "dominance: " << e.what() << '\n';
        return kDominated;
    } catch (const IdenticalActions& e) {
        err << "identical actions: " << e.what() << '\n';
        return kDominated;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputFailure;
    } catch (const json::exception& e) {
        err << "input error: " << e.what() << '\n';
        return kInputFailure;
    } catch (const DomainError& e) {
        err << "DomainError: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const fs::filesystem_error& e) {
        err << "input error: " << e.what() << '\n';
        return kInputFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
}

std::ostringstream csv_stream() {
    std::ostringstream os;
    os << std::setprecision(17);
    return os;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

std::string solution_csv(const EquilibriumSolution& sol) {
    auto os = csv_stream();
    os << "v,beta,foc_residual\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        os << sol.grid[i] << ',' << sol.bids[i] << ',' << sol.residuals[i] << '\n';
    return os.str();
}

EquilibriumSolution solve(const ScenarioConfig& cfg) {
    switch (cfg.format) {
        case Format::Fpa: return solve_fpa(*cfg.fpa);
        case Format::Spa: return solve_spa(*cfg.spa);
        case Format::Uniform: return solve_uniform_price(*cfg.spa);
    }
    throw ConfigError("unknown format");
}

std::optional<std::pair<double, double>> anchor_for(const ScenarioConfig& cfg) {
    if (!cfg.fpa) return std::nullopt;
    return std::make_pair(cfg.fpa->values.lo(), effective_boundary_bid(*cfg.fpa));
}

json indices(const std::vector<std::size_t>& v) { return json(v); }

json verdict_fields(const SafetyVerdict& v) {
    json j{{"safer", v.safer}, {"dominance", to_string(v.dominance)}, {"violation_margin", v.violation_margin}};
    j["witness"] = v.witness ? json{v.witness->first, v.witness->second} : json(nullptr);
    return j;
}

json cells_json(const AuctionPartition& c) {
    return {{"both", indices(c.both)}, {"pivotal", indices(c.pivotal)}, {"neither", indices(c.neither)}};
}

json abc_json(const PartitionABC& p) {
    return {{"A", indices(p.a_better)}, {"B", indices(p.b_better)}, {"C", indices(p.tied)}};
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& text) {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    fs::path tmp = path;
    tmp += ".tmp-" + std::to_string(rng() & 0xffffffu);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw ConfigError("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move output into place at " + path.string());
    }
}

EquilibriumSolution read_solution(const fs::path& csv, std::optional<std::pair<double, double>> anchor) {
    std::ifstream in(csv);
    if (!in) throw ConfigError("cannot read " + csv.string());
    std::string line;
    if (!std::getline(in, line) || line != "v,beta,foc_residual")
        throw ConfigError(csv.string() + ": expected header v,beta,foc_residual");
    std::vector<double> grid, bids, res;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ls(line);
        double x[3];
        char c1 = 0, c2 = 0;
        if (!(ls >> x[0] >> c1 >> x[1] >> c2 >> x[2]) || c1 != ',' || c2 != ',' || !std::isfinite(x[0]) ||
            !std::isfinite(x[1])) {
            throw ConfigError(csv.string() + ": malformed row " + std::to_string(row));
        }
        grid.push_back(x[0]);
        bids.push_back(x[1]);
        res.push_back(x[2]);
    }
    return solution_from_table(std::move(grid), std::move(bids), std::move(res), anchor);
}

json to_json(const AuditReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"v", row.v}, {"best_report", row.best_report}, {"best_bid", row.best_bid}, {"gain", row.gain}});
    return {{"max_gain", r.max_gain},     {"passed", r.passed},
            {"audit_tol", r.audit_tol},   {"deviation_grid_size", r.deviation_grid_size},
            {"seed", r.seed},             {"argmax_near_truth", r.argmax_near_truth},
            {"rows", rows}};
}

json to_json(const StatsReport& s) {
    return {{"format", s.format},
            {"rounds", s.rounds},
            {"seed", s.seed},
            {"mean_revenue", s.mean_revenue},
            {"se_revenue", s.se_revenue},
            {"allocation_frequency", s.allocation_frequency},
            {"mean_bidder_utility", s.mean_bidder_utility},
            {"se_bidder_utility", s.se_bidder_utility}};
}

json verdict_json(const ComparisonReport& r) {
    json j{{"format", r.format}, {"ordering_holds", r.ordering_holds}, {"tolerance", r.tolerance}};
    if (r.format == "fpa") {
        j["min_d"] = r.min_d;
    } else {
        j["max_d"] = r.max_d;
        j["one_sided_holds"] = r.one_sided_holds;
        double worst = -std::numeric_limits<double>::infinity();
        for (double g : r.diagnostics) worst = std::max(worst, g);
        j["max_one_sided_gap"] = worst;
    }
    return j;
}

json safety_json(const SafetyInput& in, bool& any_comparable) {
    any_comparable = false;
    json out = json::object();
    const bool want_fpa = !in.format || *in.format == Format::Fpa;
    const bool want_spa = !in.format || *in.format == Format::Spa;
    // Each pricing rule is reported on its own; a dominated pair under one
    // rule does not hide the other.
    auto attempt = [&](const char* name, auto&& body) {
        try {
            out[name] = body();
            any_comparable = true;
        } catch (const DominancePrecondition& e) {
            out[name] = {{"dominance", to_string(e.dominance())}, {"error", e.what()}};
        } catch (const IdenticalActions& e) {
            out[name] = {{"dominance", "identical"}, {"error", e.what()}};
        }
    };
    if (want_fpa) {
        attempt("fpa", [&] {
            const auto r = fpa_higher_bid_safer(in.bid_a, in.bid_b, in.states);
            return json{{"higher_bid_safer", r.verdict.safer},
                        {"verdict", verdict_fields(r.verdict)},
                        {"cells", cells_json(r.cells)},
                        {"partition", abc_json(r.partition)},
                        {"winning_cannot_hurt", r.winning_cannot_hurt},
                        {"low_bids_better_winners", r.low_bids_better_winners},
                        {"wins_cover_outside", r.wins_cover_outside},
                        {"cheap_side_covers_wins", r.cheap_side_covers_wins}};
        });
    }
    if (want_spa) {
        attempt("spa", [&] {
            const auto r = spa_lower_bid_safer(in.bid_a, in.bid_b, in.states, false);
            return json{{"lower_bid_safer", r.verdict.safer},
                        {"verdict", verdict_fields(r.verdict)},
                        {"cells", cells_json(r.cells)},
                        {"partition", abc_json(r.partition)},
                        {"known_outside", r.known_outside}};
        });
    }
    return out;
}

int cmd_solve(const fs::path& config, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_config(config);
        const auto sol = solve(cfg);
        ensure_dir(out_dir);
        for (const auto& w : sol.warnings) err << "warning: " << w << '\n';

        json meta{{"config", cfg.echo},
                  {"diagnostics",
                   {{"format", to_string(cfg.format)},
                    {"grid_points", sol.grid.size()},
                    {"derivative_check", sol.derivative_check},
                    {"monotone", sol.monotone},
                    {"warnings", sol.warnings}}}};
        if (cfg.format == Format::Uniform) meta["K"] = cfg.spa->units;
        write_atomic(out_dir / "solution.csv", solution_csv(sol));
        write_atomic(out_dir / "meta.json", meta.dump(2) + "\n");
        out << "wrote " << (out_dir / "solution.csv").string() << " (" << sol.grid.size() << " rows)\n";
        return static_cast<int>(kOk);
    });
}

int cmd_compare(const fs::path& config, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_config(config);
        if (!cfg.has_transform()) throw ConfigError("compare needs a transform section");
        ComparisonReport r;
        int code = kOk;
        try {
            r = cfg.fpa ? compare_risk_aversion_fpa(*cfg.fpa) : compare_risk_aversion_spa(*cfg.spa);
        } catch (const OrderingViolation& e) {
            err << "ordering violation: " << e.what() << '\n';
            r = e.report();
            code = kOrderingFailure;
        }
        ensure_dir(out_dir);
        auto os = csv_stream();
        os << "v,beta,beta_hat,d\n";
        for (std::size_t i = 0; i < r.grid.size(); ++i)
            os << r.grid[i] << ',' << r.beta[i] << ',' << r.beta_hat[i] << ',' << r.d[i] << '\n';
        const json verdict = verdict_json(r);
        write_atomic(out_dir / "comparison.csv", os.str());
        write_atomic(out_dir / "verdict.json", verdict.dump(2) + "\n");
        out << verdict.dump() << '\n';
        return code;
    });
}

int cmd_safety(const fs::path& problem, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto in = load_safety(problem);
        bool comparable = false;
        const json report = safety_json(in, comparable);
        out << report.dump(2) << '\n';
        if (!comparable) {
            err << "dominance: the bids cannot be compared under any requested pricing rule\n";
            return static_cast<int>(kDominated);
        }
        return static_cast<int>(kOk);
    });
}

int cmd_audit(const fs::path& config, const fs::path& dir, std::optional<std::uint64_t> seed,
              std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_config(config);
        const auto sol = read_solution(dir / "solution.csv", anchor_for(cfg));
        AuditOptions opts = cfg.audit;
        if (seed) opts.seed = *seed;
        const auto report = cfg.fpa ? best_response_audit(*cfg.fpa, sol, opts) : best_response_audit(*cfg.spa, sol, opts);
        write_atomic(dir / "audit.json", to_json(report).dump(2) + "\n");
        out << "max_gain " << report.max_gain << (report.passed ? " (pass)" : " (FAIL)") << '\n';
        return static_cast<int>(report.passed ? kOk : kAuditFailure);
    });
}

int cmd_simulate(const fs::path& config, const fs::path& dir, std::uint64_t rounds,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cfg = load_config(config);
        const auto sol = read_solution(dir / "solution.csv", anchor_for(cfg));
        const std::uint64_t s = seed ? *seed : cfg.seed;
        const auto stats = cfg.fpa ? monte_carlo_auction(*cfg.fpa, sol, rounds, s)
                                   : monte_carlo_auction(*cfg.spa, sol, rounds, s);
        write_atomic(dir / "stats.json", to_json(stats).dump(2) + "\n");
        out << "mean_revenue " << stats.mean_revenue << " (se " << stats.se_revenue << ")\n";
        return static_cast<int>(kOk);
    });
}

}  // namespace riskbid::cli
