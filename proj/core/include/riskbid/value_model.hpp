// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace riskbid {

/// Uniform on [lo, hi]; must coincide with the model support.
struct UniformDist {
    double lo = 0.0;
    double hi = 1.0;
};

/// F(t) = ((t - lo) / (hi - lo))^k on the model support.
struct PowerDist {
    double k = 1.0;
};

/// Normal(mu, sigma) truncated to [lo, hi]; the bounds must match the support.
struct TruncatedNormalDist {
    double mu = 0.0;
    double sigma = 1.0;
    double lo = 0.0;
    double hi = 1.0;
};

using MarginalDist = std::variant<UniformDist, PowerDist, TruncatedNormalDist>;

struct MixtureComponent {
    double weight = 1.0;
    MarginalDist dist;
};

/// Exchangeable joint law of n bidder types on [lo, hi]: either IID draws
/// from one marginal, or a common shock that picks a component, after which
/// types are IID from that component.
class ValueModel {
public:
    static ValueModel iid(double lo, double hi, int bidders, MarginalDist dist);
    static ValueModel mixture(double lo, double hi, int bidders,
                              std::vector<MixtureComponent> components);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double span() const noexcept { return hi_ - lo_; }
    int bidders() const noexcept { return bidders_; }
    bool is_iid() const noexcept { return iid_; }
    std::span<const MixtureComponent> components() const noexcept { return components_; }

    /// Component CDF / pdf, with t clamped into the support.
    double component_cdf(std::size_t j, double t) const;
    double component_pdf(std::size_t j, double t) const;

    /// Posterior component weights given one bidder's type v.
    std::vector<double> posterior(double v) const;

    /// Throws DomainError unless t lies in the support (up to rounding).
    void require_in_support(double t) const;

private:
    ValueModel(double lo, double hi, int bidders, bool iid, std::vector<MixtureComponent> comps);

    double lo_ = 0.0;
    double hi_ = 1.0;
    int bidders_ = 2;
    bool iid_ = true;
    std::vector<MixtureComponent> components_;
    // Truncated-normal normalizers, indexed like components_ (unused otherwise).
    std::vector<double> tn_mass_;
    std::vector<double> tn_base_;
};

double marginal_cdf(const ValueModel& vm, double t);
double marginal_pdf(const ValueModel& vm, double t);

}  // namespace riskbid
