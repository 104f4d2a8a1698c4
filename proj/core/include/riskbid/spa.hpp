// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>

#include "riskbid/bid_function.hpp"
#include "riskbid/comparison.hpp"
#include "riskbid/outside_option.hpp"
#include "riskbid/utility.hpp"
#include "riskbid/value_model.hpp"
#include "riskbid/win_payoff.hpp"

namespace riskbid {

/// Second-price (units == 1) or uniform-price (units >= 2) scenario.
struct SpaScenario {
    ValueModel values;
    OutsideOptionSpec outside = ConstantOutside{};
    UtilitySpec utility{};
    std::optional<TransformSpec> transform{};
    WinPayoffSpec win_payoff = WinPayoffSpec::deterministic();
    int units = 1;
    int grid = 257;
    double root_tol = 1e-10;
    /// Bid search interval; defaults to default_bracket().
    std::optional<std::pair<double, double>> bracket{};
};

/// Throws ConfigError when the scenario is malformed, including a unit count
/// outside {1} or {2, ..., n-1} with n >= 3.
void validate(const SpaScenario& sc);

/// [v_lo - max|s| - 3 spread, v_hi + 3 spread], spread the width of the noise support.
std::pair<double, double> default_bracket(const SpaScenario& sc);

/// E[U(W - b)] at the pivotal event with W = v + scale * eps, U the
/// scenario's effective utility.
double pivotal_expectation(const SpaScenario& sc, double v, double b);
double pivotal_expectation(const Utility& u, const WinPayoffSpec& w, double v, double b);

/// Per-type bisection of the pivotal indifference E[U(W - b)] = U(s(v)) on a
/// uniform grid over the whole support.
EquilibriumSolution solve_spa(const SpaScenario& sc);

/// P(T^(K) <= t | V_i = v), T^(K) the K-th highest opponent type.
double kth_win_prob(const ValueModel& vm, int K, double v, double t);

/// Density of T^(K) at z given V_i = v.
double kth_opponent_density(const ValueModel& vm, int K, double v, double z);

/// Uniform-price bids. K = 1 runs the second-price path unchanged; K >= 2
/// cross-checks against it and throws SolverError on disagreement beyond root_tol.
EquilibriumSolution solve_uniform_price(const SpaScenario& sc);

/// Solves with u and phi o u on the same grid. Throws OrderingViolation when
/// max d > 10 root_tol or the one-sided pivotal inequality fails.
ComparisonReport compare_risk_aversion_spa(const SpaScenario& sc);

}  // namespace riskbid
