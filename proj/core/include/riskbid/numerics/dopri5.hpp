// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace riskbid::numerics {

/// Scalar right-hand side y' = f(t, y).
using ScalarRhs = std::function<double(double, double)>;

struct Dopri5Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    double initial_step = 0.0;  ///< 0 picks a step from the local scale
    double max_step = 0.0;      ///< 0 means unbounded
    std::size_t max_steps = 200000;
};

/// Piecewise continuous extension produced by the Dormand-Prince 5(4) pair.
/// Each accepted step keeps Hairer's five dense-output coefficients, which
/// give a C^1 quartic interpolant of the solution.
class DenseTrajectory {
public:
    struct Step {
        double t0 = 0.0;
        double h = 0.0;
        std::array<double, 5> c{};
    };

    DenseTrajectory() = default;
    explicit DenseTrajectory(std::vector<Step> steps) : steps_(std::move(steps)) {}

    double t_begin() const noexcept { return steps_.empty() ? 0.0 : steps_.front().t0; }
    double t_end() const noexcept {
        return steps_.empty() ? 0.0 : steps_.back().t0 + steps_.back().h;
    }
    std::size_t step_count() const noexcept { return steps_.size(); }
    bool empty() const noexcept { return steps_.empty(); }

    /// Interpolated y(t); t is clamped into [t_begin, t_end].
    double value(double t) const;
    /// Derivative of the interpolant.
    double derivative(double t) const;

private:
    const Step& locate(double t) const;

    std::vector<Step> steps_;
};

/// Integrates y' = f(t, y) from (t0, y0) to t1 > t0 with step-size control.
/// Exceptions thrown by f propagate. Throws SolverError when the step size
/// underflows or max_steps is exceeded.
DenseTrajectory integrate_dopri5(const ScalarRhs& f, double t0, double y0, double t1,
                                 const Dopri5Options& opts = {});

}  // namespace riskbid::numerics
