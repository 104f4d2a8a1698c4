// SPDX-License-Identifier: Apache-2.0
#include "riskbid/bid_function.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "riskbid/errors.hpp"

namespace riskbid {
namespace {

bool uniformly_spaced(const std::vector<double>& g) {
    if (g.size() < 5) return false;
    const double h = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double expect = g.front() + h * static_cast<double>(i);
        if (std::abs(g[i] - expect) > 1e-9 * h) return false;
    }
    return true;
}

std::function<double(double)> with_anchor(std::function<double(double)> inner, double first_t,
                                          std::optional<std::pair<double, double>> anchor) {
    if (!anchor || !(anchor->first < first_t)) return inner;
    const auto [t_lo, b_lo] = *anchor;
    const double b_first = inner(first_t);
    return [inner = std::move(inner), t_lo, b_lo, first_t, b_first](double t) {
        if (t >= first_t) return inner(t);
        if (t <= t_lo) return b_lo;
        return b_lo + (b_first - b_lo) * (t - t_lo) / (first_t - t_lo);
    };
}

}  // namespace

BidFunction BidFunction::from_trajectory(numerics::DenseTrajectory traj,
                                         std::optional<std::pair<double, double>> anchor) {
    if (traj.empty()) throw SolverError("cannot build a bid function from an empty trajectory");
    const double first = traj.t_begin();
    auto shared = std::make_shared<const numerics::DenseTrajectory>(std::move(traj));
    BidFunction b;
    b.eval_ = with_anchor([shared](double t) { return shared->value(t); }, first, anchor);
    return b;
}

BidFunction BidFunction::from_grid(std::vector<double> grid, std::vector<double> bids,
                                   std::optional<std::pair<double, double>> anchor) {
    if (grid.size() != bids.size() || grid.size() < 2)
        throw InvalidProblem("bid table needs at least two (v, beta) rows of equal length");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw InvalidProblem("bid table grid must be strictly increasing");

    const double lo = grid.front(), hi = grid.back();
    std::function<double(double)> inner;
    if (uniformly_spaced(grid)) {
        const double h = (hi - lo) / static_cast<double>(grid.size() - 1);
        auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
            bids.begin(), bids.end(), lo, h);
        inner = [spline, lo, hi](double t) { return (*spline)(std::clamp(t, lo, hi)); };
    } else {
        auto g = std::make_shared<const std::vector<double>>(std::move(grid));
        auto b = std::make_shared<const std::vector<double>>(std::move(bids));
        inner = [g, b](double t) {
            const auto& x = *g;
            const auto& y = *b;
            if (t <= x.front()) return y.front();
            if (t >= x.back()) return y.back();
            const auto it = std::upper_bound(x.begin(), x.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - x.begin());
            return y[i - 1] + (y[i] - y[i - 1]) * (t - x[i - 1]) / (x[i] - x[i - 1]);
        };
    }
    BidFunction out;
    out.eval_ = with_anchor(std::move(inner), lo, anchor);
    return out;
}

double BidFunction::operator()(double t) const {
    if (!eval_) throw SolverError("bid function is empty");
    return eval_(t);
}

BidFunction BidFunction::scaled(double factor) const {
    BidFunction out;
    out.eval_ = [inner = eval_, factor](double t) { return factor * inner(t); };
    return out;
}

EquilibriumSolution solution_from_table(std::vector<double> grid, std::vector<double> bids,
                                        std::vector<double> residuals,
                                        std::optional<std::pair<double, double>> anchor) {
    EquilibriumSolution s;
    s.bid = BidFunction::from_grid(grid, bids, anchor);
    s.grid = std::move(grid);
    s.bids = std::move(bids);
    s.residuals = std::move(residuals);
    s.residuals.resize(s.grid.size(), 0.0);
    for (double r : s.residuals) s.derivative_check = std::max(s.derivative_check, std::abs(r));
    for (std::size_t i = 1; i < s.bids.size(); ++i)
        if (!(s.bids[i] > s.bids[i - 1])) s.monotone = false;
    return s;
}

}  // namespace riskbid
