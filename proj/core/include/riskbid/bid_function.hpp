// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "riskbid/numerics/dopri5.hpp"

namespace riskbid {

/// A bid function beta(t) on the type support, evaluable at any point.
///
/// Built either from an integrator's dense output or from tabulated grid
/// values (cubic B-spline on uniform grids, linear otherwise). Below the
/// first tabulated point it interpolates linearly from an optional anchor
/// (v_lo, beta(v_lo)).
class BidFunction {
public:
    BidFunction() = default;

    static BidFunction from_trajectory(numerics::DenseTrajectory traj,
                                       std::optional<std::pair<double, double>> anchor);
    static BidFunction from_grid(std::vector<double> grid, std::vector<double> bids,
                                 std::optional<std::pair<double, double>> anchor = std::nullopt);

    double operator()(double t) const;
    bool empty() const noexcept { return !eval_; }

    /// beta scaled by a constant factor (used for negative controls).
    BidFunction scaled(double factor) const;

private:
    std::function<double(double)> eval_;
};

/// Symmetric equilibrium bid function on a reporting grid.
struct EquilibriumSolution {
    std::vector<double> grid;
    std::vector<double> bids;
    /// Per-point residual of the defining equation (FOC for first price,
    /// pivotal indifference for second/uniform price).
    std::vector<double> residuals;
    double derivative_check = 0.0;
    bool monotone = true;
    std::vector<std::string> warnings;
    BidFunction bid;
};

/// Rebuilds a solution from tabulated (v, beta, residual) rows, as read back
/// from a solution file.
EquilibriumSolution solution_from_table(std::vector<double> grid, std::vector<double> bids,
                                        std::vector<double> residuals,
                                        std::optional<std::pair<double, double>> anchor);

}  // namespace riskbid
