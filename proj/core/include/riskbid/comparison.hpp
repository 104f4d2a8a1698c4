// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "riskbid/errors.hpp"

namespace riskbid {

/// Bid functions under u and under phi o u on a shared grid.
struct ComparisonReport {
    std::string format;  ///< "fpa", "spa" or "uniform"
    std::vector<double> grid;
    std::vector<double> beta;
    std::vector<double> beta_hat;
    std::vector<double> d;  ///< beta_hat - beta
    double min_d = 0.0;
    double max_d = 0.0;
    /// First price: M_hat(x_hat; v) - M_u(x; v). Second/uniform price: the
    /// transformed pivotal expectation at beta(v) minus u_hat(s(v)).
    std::vector<double> diagnostics;
    double tolerance = 0.0;
    bool ordering_holds = true;
    /// Second/uniform price only: every diagnostic is <= tolerance.
    bool one_sided_holds = true;
};

/// The solved bid functions contradict the expected ordering.
class OrderingViolation : public Error {
public:
    explicit OrderingViolation(ComparisonReport report, const std::string& what)
        : Error(what), report_(std::move(report)) {}
    const ComparisonReport& report() const noexcept { return report_; }

private:
    ComparisonReport report_;
};

}  // namespace riskbid
