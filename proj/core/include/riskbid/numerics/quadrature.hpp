// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "riskbid/errors.hpp"

namespace riskbid::numerics {

inline constexpr unsigned kMaxQuadratureDepth = 20;

/// Adaptive Gauss-Kronrod (15-point) integral of f over [a, b]. Throws
/// QuadratureError when the error estimate is still above tolerance after
/// max_depth bisections.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                          double abs_tol = 1e-14, unsigned max_depth = kMaxQuadratureDepth) {
    if (a == b) return 0.0;
    double error = 0.0, l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, rel_tol, &error, &l1);
    if (!std::isfinite(value) || error > std::max(rel_tol * l1, abs_tol) * 10.0) {
        std::ostringstream os;
        os << "adaptive quadrature on [" << a << ", " << b << "] did not converge within depth "
           << max_depth << " (error estimate " << error << ")";
        throw QuadratureError(os.str());
    }
    return value;
}

}  // namespace riskbid::numerics
