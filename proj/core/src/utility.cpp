// SPDX-License-Identifier: Apache-2.0
#include "riskbid/utility.hpp"

#include <cmath>
#include <sstream>

#include "riskbid/errors.hpp"

namespace riskbid {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void domain_fail(const UtilitySpec& u, double x) {
    std::ostringstream os;
    os << family_name(u) << " utility undefined at x=" << x << " (shift " << u.shift << ")";
    throw DomainError(os.str());
}

double pwl_value(const PiecewiseLinear& p, double y) {
    const auto& k = p.knots;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        if (y < k[i + 1].x) {
            return acc + k[i].slope * (y - k[i].x);
        }
        acc += k[i].slope * (k[i + 1].x - k[i].x);
    }
    return acc + k.back().slope * (y - k.back().x);
}

double pwl_slope(const PiecewiseLinear& p, double y) {
    const auto& k = p.knots;
    for (std::size_t i = k.size(); i-- > 1;) {
        if (y >= k[i].x) return k[i].slope;
    }
    return k.front().slope;
}

}  // namespace

void validate(const UtilitySpec& u) {
    if (!std::isfinite(u.shift)) throw ConfigError("utility shift must be finite");
    std::visit(
        overloaded{
            [](const Linear&) {},
            [](const Crra& c) {
                if (!(c.rho >= 0.0) || !std::isfinite(c.rho))
                    throw ConfigError("CRRA rho must be finite and >= 0");
                if (c.rho == 1.0) throw ConfigError("CRRA rho = 1 is the log family");
            },
            [](const CrraLog&) {},
            [](const Cara& c) {
                if (!(c.alpha > 0.0) || !std::isfinite(c.alpha))
                    throw ConfigError("CARA alpha must be finite and > 0");
            },
            [](const PiecewiseLinear& p) {
                if (p.knots.empty()) throw ConfigError("piecewise-linear utility needs a knot");
                for (std::size_t i = 0; i < p.knots.size(); ++i) {
                    const auto& k = p.knots[i];
                    if (!std::isfinite(k.x) || !(k.slope > 0.0) || !std::isfinite(k.slope))
                        throw ConfigError("piecewise-linear knots need finite x and positive slope");
                    if (i > 0) {
                        if (!(k.x > p.knots[i - 1].x))
                            throw ConfigError("piecewise-linear knots must be strictly increasing");
                        if (k.slope > p.knots[i - 1].slope)
                            throw ConfigError("piecewise-linear slopes must be nonincreasing");
                    }
                }
            },
        },
        u.family);
}

bool in_domain(const UtilitySpec& u, double x) noexcept {
    const double y = x + u.shift;
    if (!std::isfinite(y)) return false;
    return std::visit(overloaded{
                          [&](const Crra& c) { return c.rho < 1.0 ? y >= 0.0 : y > 0.0; },
                          [&](const CrraLog&) { return y > 0.0; },
                          [](const auto&) { return true; },
                      },
                      u.family);
}

double eval_utility(const UtilitySpec& u, double x) {
    if (!in_domain(u, x)) domain_fail(u, x);
    const double y = x + u.shift;
    return std::visit(overloaded{
                          [&](const Linear&) { return y; },
                          [&](const Crra& c) { return std::pow(y, 1.0 - c.rho) / (1.0 - c.rho); },
                          [&](const CrraLog&) { return std::log(y); },
                          [&](const Cara& c) { return -std::expm1(-c.alpha * y); },
                          [&](const PiecewiseLinear& p) { return pwl_value(p, y); },
                      },
                      u.family);
}

double eval_utility_deriv(const UtilitySpec& u, double x) {
    if (!in_domain(u, x)) domain_fail(u, x);
    const double y = x + u.shift;
    return std::visit(overloaded{
                          [&](const Linear&) { return 1.0; },
                          [&](const Crra& c) {
                              if (c.rho == 0.0) return 1.0;
                              if (y <= 0.0) domain_fail(u, x);
                              return std::pow(y, -c.rho);
                          },
                          [&](const CrraLog&) { return 1.0 / y; },
                          [&](const Cara& c) { return c.alpha * std::exp(-c.alpha * y); },
                          [&](const PiecewiseLinear& p) { return pwl_slope(p, y); },
                      },
                      u.family);
}

std::string family_name(const UtilitySpec& u) {
    return std::visit(overloaded{
                          [](const Linear&) { return std::string("linear"); },
                          [](const Crra&) { return std::string("crra"); },
                          [](const CrraLog&) { return std::string("crra_log"); },
                          [](const Cara&) { return std::string("cara"); },
                          [](const PiecewiseLinear&) { return std::string("piecewise_linear"); },
                      },
                      u.family);
}

Utility::Utility(UtilitySpec base, std::optional<TransformSpec> transform)
    : base_(std::move(base)), transform_(std::move(transform)) {
    validate(base_);
    if (transform_) validate(transform_->shape);
}

double Utility::operator()(double x) const {
    const double inner = eval_utility(base_, x);
    return transform_ ? eval_utility(transform_->shape, inner) : inner;
}

double Utility::derivative(double x) const {
    const double inner_slope = eval_utility_deriv(base_, x);
    if (!transform_) return inner_slope;
    return eval_utility_deriv(transform_->shape, eval_utility(base_, x)) * inner_slope;
}

bool Utility::in_domain(double x) const noexcept {
    if (!riskbid::in_domain(base_, x)) return false;
    if (!transform_) return true;
    const double inner = eval_utility(base_, x);
    return riskbid::in_domain(transform_->shape, inner);
}

}  // namespace riskbid
