// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace riskbid {

class ValueModel;

struct ConstantOutside {
    double s0 = 0.0;
};

/// s(v) = c0 + c1 v
struct AffineOutside {
    double c0 = 0.0;
    double c1 = 0.0;
};

/// Linear interpolation through (v, s) pairs sorted by v.
struct TableOutside {
    std::vector<std::pair<double, double>> points;
};

using OutsideOptionSpec = std::variant<ConstantOutside, AffineOutside, TableOutside>;

/// s(v). Throws DomainError when a table does not cover v.
double outside_value(const OutsideOptionSpec& s, double v);

/// Checks that s is finite on the whole support. Throws ConfigError.
void validate(const OutsideOptionSpec& s, const ValueModel& vm);

bool is_constant(const OutsideOptionSpec& s) noexcept;

}  // namespace riskbid
