// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskbid/bid_function.hpp"
#include "riskbid/fpa.hpp"
#include "riskbid/spa.hpp"

namespace riskbid {

/// q(v,t) U(v - beta(t)) + (1 - q(v,t)) U(s(v)).
double fpa_report_utility(const FpaScenario& sc, const EquilibriumSolution& sol, double v, double t);

/// int_{v_lo}^{t} m(v,z) f(z) dz + U(s(v)) (1 - q(v,t)), with T the K-th highest
/// opponent type, m(v,z) = E[U(W - beta(z))], by adaptive quadrature.
double spa_report_utility(const SpaScenario& sc, const EquilibriumSolution& sol, double v, double t);

struct AuditOptions {
    int type_grid_size = 32;
    int deviation_grid_size = 512;
    double audit_tol = 1e-6;
    std::uint64_t seed = 0;
};

struct AuditRow {
    double v = 0.0;
    double best_report = 0.0;  ///< report t maximizing the report utility
    double best_bid = 0.0;     ///< the bid that report places
    double gain = 0.0;         ///< utility of the best report over t = v
};

struct AuditReport {
    std::vector<AuditRow> rows;
    double max_gain = 0.0;
    int deviation_grid_size = 0;
    std::uint64_t seed = 0;
    double audit_tol = 0.0;
    bool argmax_near_truth = true;
    bool passed = false;
};

/// Audits t = v against a uniform deviation grid over the support, plus five
/// bids above beta(v_hi), at `type_grid_size` interior types.
AuditReport best_response_audit(const FpaScenario& sc, const EquilibriumSolution& sol,
                                const AuditOptions& opts = {});
AuditReport best_response_audit(const SpaScenario& sc, const EquilibriumSolution& sol,
                                const AuditOptions& opts = {});

struct StatsReport {
    std::string format;
    std::uint64_t rounds = 0;
    std::uint64_t seed = 0;
    double mean_revenue = 0.0;
    double se_revenue = 0.0;
    /// Units won per round, by bidder index.
    std::vector<double> allocation_frequency;
    /// Realized utility per bidder per round.
    double mean_bidder_utility = 0.0;
    double se_bidder_utility = 0.0;
};

/// Simulated auctions with every bidder following sol.bid. Reproducible for
/// a given seed; rounds are split into fixed-size shards reduced in order.
StatsReport monte_carlo_auction(const FpaScenario& sc, const EquilibriumSolution& sol,
                                std::uint64_t rounds, std::uint64_t seed);
StatsReport monte_carlo_auction(const SpaScenario& sc, const EquilibriumSolution& sol,
                                std::uint64_t rounds, std::uint64_t seed);

}  // namespace riskbid
