// SPDX-License-Identifier: Apache-2.0
#include "riskbid/outside_option.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riskbid/errors.hpp"
#include "riskbid/value_model.hpp"

namespace riskbid {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double table_value(const TableOutside& t, double v) {
    const auto& p = t.points;
    const double slack = 1e-12 * (1.0 + std::abs(p.back().first - p.front().first));
    if (v < p.front().first - slack || v > p.back().first + slack) {
        std::ostringstream os;
        os << "outside-option table does not cover v=" << v;
        throw DomainError(os.str());
    }
    if (v <= p.front().first) return p.front().second;
    if (v >= p.back().first) return p.back().second;
    auto it = std::upper_bound(p.begin(), p.end(), v,
                               [](double x, const auto& pt) { return x < pt.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *std::prev(it);
    return y0 + (y1 - y0) * (v - x0) / (x1 - x0);
}

}  // namespace

double outside_value(const OutsideOptionSpec& s, double v) {
    return std::visit(overloaded{
                          [](const ConstantOutside& c) { return c.s0; },
                          [&](const AffineOutside& a) { return a.c0 + a.c1 * v; },
                          [&](const TableOutside& t) { return table_value(t, v); },
                      },
                      s);
}

void validate(const OutsideOptionSpec& s, const ValueModel& vm) {
    std::visit(overloaded{
                   [](const ConstantOutside& c) {
                       if (!std::isfinite(c.s0)) throw ConfigError("outside option must be finite");
                   },
                   [](const AffineOutside& a) {
                       if (!std::isfinite(a.c0) || !std::isfinite(a.c1))
                           throw ConfigError("affine outside option needs finite coefficients");
                   },
                   [&](const TableOutside& t) {
                       if (t.points.size() < 2) throw ConfigError("outside-option table needs two points");
                       for (std::size_t i = 0; i < t.points.size(); ++i) {
                           const auto& [x, y] = t.points[i];
                           if (!std::isfinite(x) || !std::isfinite(y))
                               throw ConfigError("outside-option table entries must be finite");
                           if (i > 0 && !(x > t.points[i - 1].first))
                               throw ConfigError("outside-option table must be sorted by v");
                       }
                       const double slack = 1e-12 * (1.0 + vm.span());
                       if (t.points.front().first > vm.lo() + slack || t.points.back().first < vm.hi() - slack)
                           throw ConfigError("outside-option table must cover the value support");
                   },
               },
               s);
}

bool is_constant(const OutsideOptionSpec& s) noexcept {
    if (std::holds_alternative<ConstantOutside>(s)) return true;
    if (const auto* a = std::get_if<AffineOutside>(&s)) return a->c1 == 0.0;
    return false;
}

}  // namespace riskbid
