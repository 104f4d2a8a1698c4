// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace riskbid {

struct DiscreteNoise {
    std::vector<double> points;
    std::vector<double> probs;
};

struct UniformNoise {
    double lo = -1.0;
    double hi = 1.0;
};

/// Normal(mu, sigma) truncated to [lo, hi], integrated by Gauss-Legendre.
struct TruncatedNormalNoise {
    double mu = 0.0;
    double sigma = 1.0;
    double lo = -3.0;
    double hi = 3.0;
};

using NoiseDist = std::variant<DiscreteNoise, UniformNoise, TruncatedNormalNoise>;

/// Monetary payoff from winning: W = v (deterministic) or W = v + scale * eps.
/// The noise is independent of the opponents' types. The expectation rule is
/// precomputed as weighted offsets so that E[g(W)] = sum_i w_i g(v + offset_i).
class WinPayoffSpec {
public:
    static constexpr int kQuadratureOrder = 64;

    static WinPayoffSpec deterministic();
    static WinPayoffSpec additive(NoiseDist noise, double scale);

    bool is_deterministic() const noexcept { return !noise_.has_value(); }
    const NoiseDist* noise() const noexcept { return noise_ ? &*noise_ : nullptr; }
    double scale() const noexcept { return scale_; }

    std::span<const double> offsets() const noexcept { return offsets_; }
    std::span<const double> weights() const noexcept { return weights_; }

    double min_offset() const noexcept;
    double max_offset() const noexcept;
    double mean_offset() const noexcept;
    /// Width of the support of scale * eps.
    double spread() const noexcept { return max_offset() - min_offset(); }

    /// Expected value of g(v + scale * eps).
    template <class F>
    double expect(double v, F&& g) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < offsets_.size(); ++i) acc += weights_[i] * g(v + offsets_[i]);
        return acc;
    }

private:
    WinPayoffSpec() = default;

    std::optional<NoiseDist> noise_;
    double scale_ = 0.0;
    std::vector<double> offsets_;
    std::vector<double> weights_;
    double support_lo_ = 0.0;
    double support_hi_ = 0.0;
};

}  // namespace riskbid
