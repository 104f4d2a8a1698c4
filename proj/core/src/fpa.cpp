// SPDX-License-Identifier: Apache-2.0
#include "riskbid/fpa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riskbid/numerics/dopri5.hpp"
#include "riskbid/safety.hpp"

namespace riskbid {
namespace {

constexpr double kMinWinProb = 1e-300;

/// M without the surplus check; negative below s, used inside the integrator
/// where trial stages may step past the boundary.
double tradeoff_unchecked(const Utility& u, double x, double s_v) {
    return (u(x) - u(s_v)) / u.derivative(x);
}

}  // namespace

void validate(const FpaScenario& sc) {
    validate(sc.utility);
    if (sc.transform) validate(sc.transform->shape);
    validate(sc.outside, sc.values);
    if (sc.grid < kMinFpaGrid) {
        std::ostringstream os;
        os << "grid must have at least " << kMinFpaGrid << " points (got " << sc.grid << ")";
        throw ConfigError(os.str());
    }
    if (!(sc.ode_tol > 0.0) || !(sc.ode_tol < 1e-2)) throw ConfigError("ode_tol must lie in (0, 1e-2)");
    const double eps = effective_start_offset(sc);
    if (!(eps > 0.0) || !(eps < 0.01 * sc.values.span()))
        throw ConfigError("start_offset must lie in (0, 0.01 * span)");

    const double lo = sc.values.lo();
    const double b_lo = effective_boundary_bid(sc);
    if (!std::isfinite(b_lo)) throw ConfigError("boundary_bid must be finite");
    if (b_lo > lo - outside_value(sc.outside, lo) + kTieTolerance)
        throw ConfigError("boundary_bid must not exceed v_lo - s(v_lo)");
    // Some bid at or above the boundary must leave positive surplus at every interior type.
    for (int i = 1; i < 64; ++i) {
        const double v = lo + sc.values.span() * i / 64.0;
        if (!(v - b_lo > outside_value(sc.outside, v))) {
            std::ostringstream os;
            os << "no undominated bid at v = " << v << ": v - boundary_bid <= s(v)";
            throw ConfigError(os.str());
        }
    }
}

double effective_boundary_bid(const FpaScenario& sc) {
    if (sc.boundary_bid) return *sc.boundary_bid;
    const double lo = sc.values.lo();
    return lo - outside_value(sc.outside, lo);
}

double effective_start_offset(const FpaScenario& sc) {
    return sc.start_offset ? *sc.start_offset : 1e-6 * sc.values.span();
}

double win_prob(const ValueModel& vm, double v, double t) {
    vm.require_in_support(v);
    vm.require_in_support(t);
    const auto post = vm.posterior(v);
    const int m = vm.bidders() - 1;
    double q = 0.0;
    for (std::size_t j = 0; j < post.size(); ++j) q += post[j] * std::pow(vm.component_cdf(j, t), m);
    return std::clamp(q, 0.0, 1.0);
}

double hazard(const ValueModel& vm, double v) {
    vm.require_in_support(v);
    const auto post = vm.posterior(v);
    const int m = vm.bidders() - 1;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < post.size(); ++j) {
        const double F = vm.component_cdf(j, v);
        num += post[j] * m * std::pow(F, m - 1) * vm.component_pdf(j, v);
        den += post[j] * std::pow(F, m);
    }
    if (!(den >= kMinWinProb)) {
        std::ostringstream os;
        os << "win probability vanishes at v = " << v << "; hazard undefined";
        throw SingularHazard(os.str());
    }
    return num / den;
}

double hazard_fd(const ValueModel& vm, double v) {
    const double q = win_prob(vm, v, v);
    if (!(q >= kMinWinProb)) throw SingularHazard("win probability vanishes; hazard undefined");
    const double h = 1e-6 * vm.span();
    const double t_lo = std::max(vm.lo(), v - h);
    const double t_hi = std::min(vm.hi(), v + h);
    return (win_prob(vm, v, t_hi) - win_prob(vm, v, t_lo)) / (t_hi - t_lo) / q;
}

double marginal_tradeoff(const Utility& u, double x, double s_v) {
    if (!(x > s_v)) {
        std::ostringstream os;
        os << "surplus " << x << " does not exceed the outside option " << s_v;
        throw NonpositiveSurplus(os.str());
    }
    return tradeoff_unchecked(u, x, s_v);
}

double marginal_tradeoff(const UtilitySpec& u, double x, double s_v) {
    return marginal_tradeoff(Utility(u), x, s_v);
}

EquilibriumSolution solve_fpa(const FpaScenario& sc) {
    validate(sc);
    const Utility u(sc.utility, sc.transform);
    const ValueModel& vm = sc.values;
    const double lo = vm.lo(), hi = vm.hi();
    const double eps = effective_start_offset(sc);
    const double b_lo = effective_boundary_bid(sc);
    const double v0 = lo + eps;
    const double s0 = outside_value(sc.outside, v0);

    auto rhs = [&](double v, double beta) {
        return hazard(vm, v) * tradeoff_unchecked(u, v - beta, outside_value(sc.outside, v));
    };

    // Implicit Euler micro-step from (v_lo, b_lo): beta1 = b_lo + eps * L(v0) * M(v0 - beta1).
    // g is increasing in beta1 and changes sign on [b_lo, v0 - s(v0)].
    const double lambda0 = hazard(vm, v0);
    double lo_b = b_lo, hi_b = v0 - s0;
    if (!(hi_b > lo_b)) throw SingularHazard("no room for an undominated first bid above the boundary");
    auto g = [&](double beta) { return beta - b_lo - eps * lambda0 * tradeoff_unchecked(u, v0 - beta, s0); };
    for (int it = 0; it < 200; ++it) {
        const double mid = lo_b + 0.5 * (hi_b - lo_b);
        if (mid <= lo_b || mid >= hi_b) break;
        (g(mid) < 0.0 ? lo_b : hi_b) = mid;
    }
    const double beta1 = lo_b + 0.5 * (hi_b - lo_b);

    numerics::Dopri5Options opts;
    opts.rtol = sc.ode_tol * 1e-2;
    opts.atol = sc.ode_tol * 1e-2;
    opts.max_step = (hi - v0) / (sc.grid - 1);
    auto traj = numerics::integrate_dopri5(rhs, v0, beta1, hi, opts);

    EquilibriumSolution sol;
    const int n = sc.grid;
    sol.grid.resize(n);
    sol.bids.resize(n);
    sol.residuals.resize(n);
    std::size_t bound_breaches = 0, dominated = 0;
    for (int i = 0; i < n; ++i) {
        const double v = (i == n - 1) ? hi : v0 + (hi - v0) * i / (n - 1);
        const double beta = traj.value(v);
        const double slope = rhs(v, beta);
        const double res = std::abs(traj.derivative(v) - slope);
        sol.grid[i] = v;
        sol.bids[i] = beta;
        sol.residuals[i] = res;
        sol.derivative_check = std::max(sol.derivative_check, res);
        if (res > 10.0 * sc.ode_tol * (1.0 + std::abs(slope))) ++bound_breaches;
        if (!(beta < v - outside_value(sc.outside, v))) ++dominated;
    }

    int run = 0, longest = 0;
    for (int i = 1; i < n; ++i) {
        run = (sol.bids[i] > sol.bids[i - 1]) ? 0 : run + 1;
        longest = std::max(longest, run);
    }
    if (longest > 2) {
        std::ostringstream os;
        os << "bid function fails to increase over " << longest << " consecutive grid cells";
        throw NonmonotoneSolution(os.str());
    }
    if (longest > 0) {
        sol.monotone = false;
        sol.warnings.push_back("bid function is not strictly increasing on the grid");
    }
    if (bound_breaches > 0)
        sol.warnings.push_back("FOC residual above 10 * ode_tol * (1 + |rhs|) at " +
                               std::to_string(bound_breaches) + " grid points");
    if (dominated > 0)
        sol.warnings.push_back("bid at or above v - s(v) at " + std::to_string(dominated) + " grid points");

    sol.bid = BidFunction::from_trajectory(std::move(traj), std::make_pair(lo, b_lo));
    return sol;
}

double closed_form_crra_uniform(int n, double rho) {
    if (n < 2 || !(rho >= 0.0) || !(rho < 1.0)) throw PreconditionError("closed form needs n >= 2 and rho in [0, 1)");
    return (n - 1.0) / (n - rho);
}

ComparisonReport compare_risk_aversion_fpa(const FpaScenario& sc) {
    if (!sc.transform) throw ConfigError("comparison needs a transform");
    FpaScenario base = sc;
    base.transform.reset();
    base.boundary_bid = effective_boundary_bid(sc);
    FpaScenario hat = sc;
    hat.boundary_bid = base.boundary_bid;

    const auto sol = solve_fpa(base);
    const auto sol_hat = solve_fpa(hat);
    const Utility u(sc.utility);
    const Utility u_hat(sc.utility, sc.transform);

    ComparisonReport r;
    r.format = "fpa";
    r.grid = sol.grid;
    r.beta = sol.bids;
    r.beta_hat = sol_hat.bids;
    r.tolerance = 10.0 * sc.ode_tol;
    r.min_d = r.max_d = r.beta_hat.front() - r.beta.front();
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const double v = r.grid[i];
        const double s = outside_value(sc.outside, v);
        const double di = r.beta_hat[i] - r.beta[i];
        r.d.push_back(di);
        r.min_d = std::min(r.min_d, di);
        r.max_d = std::max(r.max_d, di);
        r.diagnostics.push_back(tradeoff_unchecked(u_hat, v - r.beta_hat[i], s) -
                                tradeoff_unchecked(u, v - r.beta[i], s));
    }
    r.ordering_holds = r.min_d >= -r.tolerance;
    if (!r.ordering_holds) {
        std::ostringstream os;
        os << "first-price ordering violated: min d = " << r.min_d << " < -" << r.tolerance;
        throw OrderingViolation(std::move(r), os.str());
    }
    return r;
}

}  // namespace riskbid
