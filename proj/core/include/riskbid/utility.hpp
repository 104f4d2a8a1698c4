// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace riskbid {

/// u(y) = y
struct Linear {};

/// u(y) = y^(1-rho) / (1-rho), rho >= 0 and rho != 1.
struct Crra {
    double rho = 0.0;
};

/// u(y) = ln(y); the rho = 1 member of the CRRA family.
struct CrraLog {};

/// u(y) = 1 - exp(-alpha y), alpha > 0.
struct Cara {
    double alpha = 1.0;
};

/// Continuous piecewise-linear concave utility. Knot i starts a segment of
/// slope `slope`; the first slope extends to -inf. u(knots[0].x) = 0.
struct PiecewiseLinear {
    struct Knot {
        double x = 0.0;
        double slope = 1.0;
    };
    std::vector<Knot> knots;
};

using UtilityFamily = std::variant<Linear, Crra, CrraLog, Cara, PiecewiseLinear>;

/// A parametric utility u(x) = g(x + shift) where g is the family's kernel.
struct UtilitySpec {
    UtilityFamily family = Linear{};
    double shift = 0.0;
};

/// A concave transform phi. It reuses the utility families (all of them are
/// weakly concave) and is applied to utility values, not money.
struct TransformSpec {
    UtilitySpec shape;
};

/// Throws ConfigError on bad parameters.
void validate(const UtilitySpec& u);

/// True when u(x) is defined.
bool in_domain(const UtilitySpec& u, double x) noexcept;

/// u(x). Throws DomainError outside the domain.
double eval_utility(const UtilitySpec& u, double x);

/// u'(x) in closed form. Throws DomainError unless x is interior.
double eval_utility_deriv(const UtilitySpec& u, double x);

std::string family_name(const UtilitySpec& u);

/// Effective utility: either a bare u or the composition phi o u.
class Utility {
public:
    Utility() = default;
    explicit Utility(UtilitySpec base, std::optional<TransformSpec> transform = std::nullopt);

    double operator()(double x) const;
    double derivative(double x) const;
    bool in_domain(double x) const noexcept;

    const UtilitySpec& base() const noexcept { return base_; }
    const std::optional<TransformSpec>& transform() const noexcept { return transform_; }

private:
    UtilitySpec base_{};
    std::optional<TransformSpec> transform_;
};

}  // namespace riskbid
