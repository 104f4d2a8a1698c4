// SPDX-License-Identifier: Apache-2.0
#include "riskbid/win_payoff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>

#include "riskbid/errors.hpp"

namespace riskbid {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Full set of Gauss-Legendre nodes/weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> legendre_rule() {
    using Rule = boost::math::quadrature::gauss<double, WinPayoffSpec::kQuadratureOrder>;
    const auto& half_x = Rule::abscissa();
    const auto& half_w = Rule::weights();
    std::vector<double> x, w;
    // Even order: abscissa() holds the positive half only.
    for (std::size_t i = half_x.size(); i-- > 0;) {
        x.push_back(-half_x[i]);
        w.push_back(half_w[i]);
    }
    for (std::size_t i = 0; i < half_x.size(); ++i) {
        x.push_back(half_x[i]);
        w.push_back(half_w[i]);
    }
    return {x, w};
}

}  // namespace

WinPayoffSpec WinPayoffSpec::deterministic() {
    WinPayoffSpec w;
    w.offsets_ = {0.0};
    w.weights_ = {1.0};
    return w;
}

WinPayoffSpec WinPayoffSpec::additive(NoiseDist noise, double scale) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw ConfigError("noise scale must be finite and >= 0");
    WinPayoffSpec w;
    std::vector<double> eps, prob;
    std::visit(
        overloaded{
            [&](const DiscreteNoise& d) {
                if (d.points.empty() || d.points.size() != d.probs.size())
                    throw ConfigError("discrete noise needs matching points and probs");
                double total = 0.0;
                for (std::size_t i = 0; i < d.points.size(); ++i) {
                    if (!std::isfinite(d.points[i]) || !(d.probs[i] > 0.0))
                        throw ConfigError("discrete noise needs finite points and positive probs");
                    total += d.probs[i];
                }
                if (std::abs(total - 1.0) > 1e-9) throw ConfigError("discrete noise probs must sum to 1");
                eps = d.points;
                prob = d.probs;
                for (auto& p : prob) p /= total;
                w.support_lo_ = *std::min_element(eps.begin(), eps.end());
                w.support_hi_ = *std::max_element(eps.begin(), eps.end());
            },
            [&](const UniformNoise& u) {
                if (!std::isfinite(u.lo) || !std::isfinite(u.hi) || !(u.lo < u.hi))
                    throw ConfigError("uniform noise needs finite lo < hi");
                auto [x, wt] = legendre_rule();
                const double half = 0.5 * (u.hi - u.lo), mid = 0.5 * (u.hi + u.lo);
                for (std::size_t i = 0; i < x.size(); ++i) {
                    eps.push_back(mid + half * x[i]);
                    prob.push_back(0.5 * wt[i]);
                }
                w.support_lo_ = u.lo;
                w.support_hi_ = u.hi;
            },
            [&](const TruncatedNormalNoise& t) {
                if (!std::isfinite(t.mu) || !(t.sigma > 0.0) || !(t.lo < t.hi) || !std::isfinite(t.lo) ||
                    !std::isfinite(t.hi))
                    throw ConfigError("truncated normal noise needs sigma > 0 and finite lo < hi");
                auto [x, wt] = legendre_rule();
                const double half = 0.5 * (t.hi - t.lo), mid = 0.5 * (t.hi + t.lo);
                for (std::size_t i = 0; i < x.size(); ++i) {
                    const double e = mid + half * x[i];
                    const double z = (e - t.mu) / t.sigma;
                    eps.push_back(e);
                    prob.push_back(wt[i] * std::exp(-0.5 * z * z));
                }
                // Normalize by the rule's own mass so constants integrate exactly.
                const double mass = std::accumulate(prob.begin(), prob.end(), 0.0);
                if (!(mass > 0.0)) throw ConfigError("truncated normal noise has no mass on [lo, hi]");
                for (auto& p : prob) p /= mass;
                w.support_lo_ = t.lo;
                w.support_hi_ = t.hi;
            },
        },
        noise);
    w.noise_ = std::move(noise);
    w.scale_ = scale;
    w.offsets_.resize(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) w.offsets_[i] = scale * eps[i];
    w.weights_ = std::move(prob);
    return w;
}

double WinPayoffSpec::min_offset() const noexcept { return scale_ * support_lo_; }

double WinPayoffSpec::max_offset() const noexcept { return scale_ * support_hi_; }

double WinPayoffSpec::mean_offset() const noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < offsets_.size(); ++i) acc += weights_[i] * offsets_[i];
    return acc;
}

}  // namespace riskbid
