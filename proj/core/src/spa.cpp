// SPDX-License-Identifier: Apache-2.0
#include "riskbid/spa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/binomial.hpp>

namespace riskbid {
namespace {

constexpr int kMaxWidenings = 4;
constexpr int kMaxBisections = 400;

struct RootResult {
    double bid = 0.0;
    double residual = 0.0;
};

/// rho_v(b) - U(s); nullopt when b pushes W - b out of the utility domain,
/// which only happens for bids that are too high.
std::optional<double> pivotal_gap(const Utility& u, const WinPayoffSpec& w, double v, double b,
                                  double target) {
    try {
        return pivotal_expectation(u, w, v, b) - target;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

bool below(const std::optional<double>& g) { return !g || *g < 0.0; }

RootResult solve_type(const Utility& u, const WinPayoffSpec& w, double v, double target,
                      std::pair<double, double> bracket, double tol) {
    auto [lo, hi] = bracket;
    const double res_tol = tol * (1.0 + std::abs(target));
    std::optional<double> g_lo = pivotal_gap(u, w, v, lo, target);
    std::optional<double> g_hi = pivotal_gap(u, w, v, hi, target);
    for (int k = 0; k < kMaxWidenings && (below(g_lo) || (g_hi && *g_hi > 0.0)); ++k) {
        const double half = 0.5 * (hi - lo);
        if (below(g_lo)) g_lo = pivotal_gap(u, w, v, lo -= half, target);
        if (g_hi && *g_hi > 0.0) g_hi = pivotal_gap(u, w, v, hi += half, target);
    }
    if (!g_lo) throw DomainError("pivotal expectation undefined even at the lowest bracket bid");
    if (std::abs(*g_lo) <= res_tol && *g_lo <= 0.0) return {lo, std::abs(*g_lo)};
    if (g_hi && std::abs(*g_hi) <= res_tol && *g_hi >= 0.0) return {hi, std::abs(*g_hi)};
    if (*g_lo < 0.0 || (g_hi && *g_hi > 0.0)) {
        std::ostringstream os;
        os << "no sign change of the pivotal gap on [" << lo << ", " << hi << "] at v = " << v;
        throw BracketError(os.str());
    }

    RootResult best{lo, std::abs(*g_lo)};
    for (int it = 0; it < kMaxBisections; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const auto g = pivotal_gap(u, w, v, mid, target);
        if (g && std::abs(*g) <= best.residual) best = {mid, std::abs(*g)};
        if (g && *g == 0.0) return {mid, 0.0};
        (below(g) ? hi : lo) = mid;
        if (g && hi - lo <= tol * (1.0 + std::abs(mid)) && std::abs(*g) <= res_tol) return {mid, std::abs(*g)};
    }
    return best;
}

/// Shared path for the second-price and uniform-price solves.
EquilibriumSolution solve_pivotal(const SpaScenario& sc) {
    const Utility u(sc.utility, sc.transform);
    const ValueModel& vm = sc.values;
    const auto bracket = sc.bracket ? *sc.bracket : default_bracket(sc);
    const int n = sc.grid;

    EquilibriumSolution sol;
    sol.grid.resize(n);
    sol.bids.resize(n);
    sol.residuals.resize(n);
    std::size_t unresolved = 0;
    for (int i = 0; i < n; ++i) {
        const double v = (i == n - 1) ? vm.hi() : vm.lo() + vm.span() * i / (n - 1);
        const double target = u(outside_value(sc.outside, v));
        const auto root = solve_type(u, sc.win_payoff, v, target, bracket, sc.root_tol);
        sol.grid[i] = v;
        sol.bids[i] = root.bid;
        sol.residuals[i] = root.residual;
        sol.derivative_check = std::max(sol.derivative_check, root.residual);
        if (root.residual > sc.root_tol * (1.0 + std::abs(target))) ++unresolved;
    }
    for (int i = 1; i < n; ++i)
        if (!(sol.bids[i] > sol.bids[i - 1])) sol.monotone = false;
    if (!sol.monotone) sol.warnings.push_back("bid function is not strictly increasing on the grid");
    if (unresolved > 0)
        sol.warnings.push_back("pivotal residual above root_tol at " + std::to_string(unresolved) +
                               " grid points");
    sol.bid = BidFunction::from_grid(sol.grid, sol.bids);
    return sol;
}

double binom(int n, int k) { return boost::math::binomial_coefficient<double>(n, k); }

void require_units(const ValueModel& vm, int K) {
    const int n = vm.bidders();
    if (K < 1 || K > n - 1) {
        std::ostringstream os;
        os << "units K = " << K << " outside 1.." << n - 1 << " for n = " << n;
        throw ConfigError(os.str());
    }
}

}  // namespace

void validate(const SpaScenario& sc) {
    validate(sc.utility);
    if (sc.transform) validate(sc.transform->shape);
    validate(sc.outside, sc.values);
    const int n = sc.values.bidders();
    if (sc.units < 1) throw ConfigError("K must be at least 1");
    if (sc.units >= 2 && n < 3) throw ConfigError("uniform-price runs need n >= 3");
    if (sc.units >= 2 && sc.units > n - 1) {
        std::ostringstream os;
        os << "K = " << sc.units << " exceeds n - 1 = " << n - 1;
        throw ConfigError(os.str());
    }
    if (sc.grid < 2) throw ConfigError("grid must have at least two points");
    if (!(sc.root_tol > 0.0) || !(sc.root_tol < 1e-2)) throw ConfigError("root_tol must lie in (0, 1e-2)");
    if (sc.bracket && !(sc.bracket->first < sc.bracket->second))
        throw ConfigError("bracket must satisfy lo < hi");
}

std::pair<double, double> default_bracket(const SpaScenario& sc) {
    const ValueModel& vm = sc.values;
    double max_s = 0.0;
    for (int i = 0; i <= 256; ++i)
        max_s = std::max(max_s, std::abs(outside_value(sc.outside, vm.lo() + vm.span() * i / 256.0)));
    const double spread = sc.win_payoff.spread();
    return {vm.lo() - max_s - 3.0 * spread, vm.hi() + 3.0 * spread};
}

double pivotal_expectation(const Utility& u, const WinPayoffSpec& w, double v, double b) {
    return w.expect(v - b, [&](double x) { return u(x); });
}

double pivotal_expectation(const SpaScenario& sc, double v, double b) {
    return pivotal_expectation(Utility(sc.utility, sc.transform), sc.win_payoff, v, b);
}

EquilibriumSolution solve_spa(const SpaScenario& sc) {
    validate(sc);
    return solve_pivotal(sc);
}

double kth_win_prob(const ValueModel& vm, int K, double v, double t) {
    require_units(vm, K);
    vm.require_in_support(v);
    vm.require_in_support(t);
    const int m = vm.bidders() - 1;
    const auto post = vm.posterior(v);
    double q = 0.0;
    for (std::size_t c = 0; c < post.size(); ++c) {
        const double F = vm.component_cdf(c, t);
        double tail = 0.0;
        for (int j = 0; j < K; ++j) tail += binom(m, j) * std::pow(1.0 - F, j) * std::pow(F, m - j);
        q += post[c] * tail;
    }
    return std::clamp(q, 0.0, 1.0);
}

double kth_opponent_density(const ValueModel& vm, int K, double v, double z) {
    require_units(vm, K);
    vm.require_in_support(v);
    vm.require_in_support(z);
    const int m = vm.bidders() - 1;
    const auto post = vm.posterior(v);
    const double coef = m * binom(m - 1, K - 1);
    double f = 0.0;
    for (std::size_t c = 0; c < post.size(); ++c) {
        const double F = vm.component_cdf(c, z);
        f += post[c] * coef * std::pow(F, m - K) * std::pow(1.0 - F, K - 1) * vm.component_pdf(c, z);
    }
    return f;
}

EquilibriumSolution solve_uniform_price(const SpaScenario& sc) {
    validate(sc);
    auto sol = solve_pivotal(sc);
    if (sc.units == 1) return sol;

    SpaScenario single = sc;
    single.units = 1;
    const auto ref = solve_pivotal(single);
    for (std::size_t i = 0; i < sol.bids.size(); ++i) {
        if (std::abs(sol.bids[i] - ref.bids[i]) > sc.root_tol * (1.0 + std::abs(ref.bids[i]))) {
            std::ostringstream os;
            os << "uniform-price bid differs from second-price bid at v = " << sol.grid[i];
            throw SolverError(os.str());
        }
    }
    return sol;
}

ComparisonReport compare_risk_aversion_spa(const SpaScenario& sc) {
    if (!sc.transform) throw ConfigError("comparison needs a transform");
    validate(sc);
    SpaScenario base = sc;
    base.transform.reset();
    // Both solves share the default bracket computed for the base scenario.
    if (!base.bracket) base.bracket = default_bracket(sc);
    SpaScenario hat = sc;
    hat.bracket = base.bracket;

    const auto sol = solve_pivotal(base);
    const auto sol_hat = solve_pivotal(hat);
    const Utility u_hat(sc.utility, sc.transform);

    ComparisonReport r;
    r.format = sc.units >= 2 ? "uniform" : "spa";
    r.grid = sol.grid;
    r.beta = sol.bids;
    r.beta_hat = sol_hat.bids;
    r.tolerance = 10.0 * sc.root_tol;
    r.min_d = r.max_d = r.beta_hat.front() - r.beta.front();
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const double v = r.grid[i];
        const double di = r.beta_hat[i] - r.beta[i];
        r.d.push_back(di);
        r.min_d = std::min(r.min_d, di);
        r.max_d = std::max(r.max_d, di);
        double gap = -std::numeric_limits<double>::infinity();
        try {
            gap = pivotal_expectation(u_hat, sc.win_payoff, v, r.beta[i]) - u_hat(outside_value(sc.outside, v));
        } catch (const DomainError&) {
            // beta(v) already lies outside the transformed utility's domain.
        }
        r.diagnostics.push_back(gap);
        if (gap > r.tolerance) r.one_sided_holds = false;
    }
    r.ordering_holds = r.max_d <= r.tolerance && r.one_sided_holds;
    if (!r.ordering_holds) {
        std::ostringstream os;
        os << "second-price ordering violated: max d = " << r.max_d;
        if (!r.one_sided_holds) os << "; one-sided pivotal inequality fails";
        throw OrderingViolation(std::move(r), os.str());
    }
    return r;
}

}  // namespace riskbid
