// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "riskbid/bid_function.hpp"
#include "riskbid/comparison.hpp"
#include "riskbid/outside_option.hpp"
#include "riskbid/utility.hpp"
#include "riskbid/value_model.hpp"

namespace riskbid {

struct FpaScenario {
    ValueModel values;
    OutsideOptionSpec outside = ConstantOutside{};
    UtilitySpec utility{};
    std::optional<TransformSpec> transform{};
    /// beta(v_lo); defaults to v_lo - s(v_lo).
    std::optional<double> boundary_bid{};
    int grid = 257;
    double ode_tol = 1e-8;
    /// Distance from v_lo where integration starts; defaults to 1e-6 * span.
    std::optional<double> start_offset{};
};

inline constexpr int kMinFpaGrid = 64;

/// Throws ConfigError when the scenario is malformed.
void validate(const FpaScenario& sc);

double effective_boundary_bid(const FpaScenario& sc);
double effective_start_offset(const FpaScenario& sc);

/// P(T <= t | V_i = v), T the highest opponent type.
double win_prob(const ValueModel& vm, double v, double t);

/// d/dt q(v, t) at t = v, divided by q(v, v); closed form for every model.
double hazard(const ValueModel& vm, double v);

/// Same quantity from a central difference of win_prob with step 1e-6 * span.
double hazard_fd(const ValueModel& vm, double v);

/// (u(x) - u(s)) / u'(x). Throws NonpositiveSurplus unless x > s.
double marginal_tradeoff(const UtilitySpec& u, double x, double s_v);
double marginal_tradeoff(const Utility& u, double x, double s_v);

/// Integrates beta' = hazard * M(v - beta; s(v)) from v_lo + start_offset to
/// v_hi and samples it on a uniform grid.
EquilibriumSolution solve_fpa(const FpaScenario& sc);

/// c in beta(v) = c v for IID uniform values on [0, 1], s = 0 and CRRA rho.
double closed_form_crra_uniform(int n, double rho);

/// Solves with u and with phi o u under a common boundary bid. Throws
/// OrderingViolation when min d < -10 ode_tol.
ComparisonReport compare_risk_aversion_fpa(const FpaScenario& sc);

}  // namespace riskbid
