// SPDX-License-Identifier: Apache-2.0
#include "riskbid/value_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
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

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * (1.0 + scale); }

}  // namespace

ValueModel::ValueModel(double lo, double hi, int bidders, bool iid,
                       std::vector<MixtureComponent> comps)
    : lo_(lo), hi_(hi), bidders_(bidders), iid_(iid), components_(std::move(comps)) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ConfigError("value support needs finite lo < hi");
    if (bidders < 2) throw ConfigError("need at least two bidders");
    if (components_.empty()) throw ConfigError("value model needs at least one component");

    const double scale = std::max(std::abs(lo), std::abs(hi));
    double total = 0.0;
    tn_mass_.assign(components_.size(), 1.0);
    tn_base_.assign(components_.size(), 0.0);
    for (std::size_t j = 0; j < components_.size(); ++j) {
        auto& c = components_[j];
        if (!(c.weight > 0.0) || !std::isfinite(c.weight))
            throw ConfigError("mixture weights must be positive");
        total += c.weight;
        std::visit(overloaded{
                       [&](const UniformDist& u) {
                           if (!close(u.lo, lo, scale) || !close(u.hi, hi, scale))
                               throw ConfigError("uniform marginal must span the value support");
                       },
                       [&](const PowerDist& p) {
                           if (!(p.k > 0.0) || !std::isfinite(p.k))
                               throw ConfigError("power exponent must be positive");
                       },
                       [&](const TruncatedNormalDist& t) {
                           if (!(t.sigma > 0.0) || !std::isfinite(t.mu))
                               throw ConfigError("truncated normal needs sigma > 0");
                           if (!close(t.lo, lo, scale) || !close(t.hi, hi, scale))
                               throw ConfigError("truncated normal bounds must match the value support");
                           const double a = std_normal_cdf((lo - t.mu) / t.sigma);
                           const double b = std_normal_cdf((hi - t.mu) / t.sigma);
                           if (!(b - a > 1e-300))
                               throw ConfigError("truncated normal has no mass on the support");
                           tn_base_[j] = a;
                           tn_mass_[j] = b - a;
                       },
                   },
                   c.dist);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "mixture weights must sum to 1 (got " << total << ")";
        throw ConfigError(os.str());
    }
}

ValueModel ValueModel::iid(double lo, double hi, int bidders, MarginalDist dist) {
    return ValueModel(lo, hi, bidders, true, {MixtureComponent{1.0, std::move(dist)}});
}

ValueModel ValueModel::mixture(double lo, double hi, int bidders,
                               std::vector<MixtureComponent> components) {
    return ValueModel(lo, hi, bidders, false, std::move(components));
}

void ValueModel::require_in_support(double t) const {
    const double slack = 1e-12 * (1.0 + span());
    if (!(t >= lo_ - slack && t <= hi_ + slack)) {
        std::ostringstream os;
        os << "type " << t << " outside support [" << lo_ << ", " << hi_ << "]";
        throw DomainError(os.str());
    }
}

double ValueModel::component_cdf(std::size_t j, double t) const {
    t = std::clamp(t, lo_, hi_);
    const double z = (t - lo_) / span();
    return std::visit(overloaded{
                          [&](const UniformDist&) { return z; },
                          [&](const PowerDist& p) { return std::pow(z, p.k); },
                          [&](const TruncatedNormalDist& d) {
                              const double c = std_normal_cdf((t - d.mu) / d.sigma) - tn_base_[j];
                              return std::clamp(c / tn_mass_[j], 0.0, 1.0);
                          },
                      },
                      components_[j].dist);
}

double ValueModel::component_pdf(std::size_t j, double t) const {
    t = std::clamp(t, lo_, hi_);
    const double z = (t - lo_) / span();
    return std::visit(overloaded{
                          [&](const UniformDist&) { return 1.0 / span(); },
                          [&](const PowerDist& p) { return p.k * std::pow(z, p.k - 1.0) / span(); },
                          [&](const TruncatedNormalDist& d) {
                              return std_normal_pdf((t - d.mu) / d.sigma) / (d.sigma * tn_mass_[j]);
                          },
                      },
                      components_[j].dist);
}

std::vector<double> ValueModel::posterior(double v) const {
    std::vector<double> w(components_.size());
    if (components_.size() == 1) {
        w[0] = 1.0;
        return w;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const double f = component_pdf(j, v);
        w[j] = components_[j].weight * (std::isfinite(f) ? f : 0.0);
        total += w[j];
    }
    if (!(total > 0.0)) {
        // Every density vanishes at v (boundary of a power law); fall back on the prior.
        for (std::size_t j = 0; j < components_.size(); ++j) w[j] = components_[j].weight;
        return w;
    }
    for (auto& x : w) x /= total;
    return w;
}

double marginal_cdf(const ValueModel& vm, double t) {
    vm.require_in_support(t);
    double acc = 0.0;
    for (std::size_t j = 0; j < vm.components().size(); ++j)
        acc += vm.components()[j].weight * vm.component_cdf(j, t);
    return std::clamp(acc, 0.0, 1.0);
}

double marginal_pdf(const ValueModel& vm, double t) {
    vm.require_in_support(t);
    double acc = 0.0;
    for (std::size_t j = 0; j < vm.components().size(); ++j)
        acc += vm.components()[j].weight * vm.component_pdf(j, t);
    return acc;
}

}  // namespace riskbid
