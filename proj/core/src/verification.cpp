// SPDX-License-Identifier: Apache-2.0
#include "riskbid/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "riskbid/numerics/quadrature.hpp"

namespace riskbid {
namespace {

constexpr int kOverbidProbes = 5;
constexpr double kProbeStep = 0.02;  // fraction of the support per probe
constexpr std::uint64_t kShardRounds = 1u << 16;

struct Candidate {
    double report;
    double bid;
    double utility;
};

std::vector<double> audit_types(const ValueModel& vm, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = vm.lo() + vm.span() * (i + 0.5) / count;
    return v;
}

std::vector<double> deviation_grid(const ValueModel& vm, int size) {
    std::vector<double> t(size);
    for (int j = 0; j < size; ++j) t[j] = (j == size - 1) ? vm.hi() : vm.lo() + vm.span() * j / (size - 1);
    return t;
}

void require_audit_options(const AuditOptions& o) {
    if (o.type_grid_size < 1) throw ConfigError("audit needs at least one type");
    if (o.deviation_grid_size < 2) throw ConfigError("audit needs at least two deviation points");
    if (!(o.audit_tol > 0.0)) throw ConfigError("audit_tol must be positive");
}

/// Picks the best candidate, preferring the one nearest the truthful report
/// among those within rounding noise of the maximum.
AuditRow best_of(double v, double truthful, const std::vector<Candidate>& cands) {
    double top = truthful;
    for (const auto& c : cands) top = std::max(top, c.utility);
    const double floor = 1e-12 * (1.0 + std::abs(truthful));
    AuditRow row{v, v, 0.0, top - truthful};
    double nearest = std::numeric_limits<double>::infinity();
    if (truthful >= top - floor) nearest = 0.0;
    for (const auto& c : cands) {
        if (c.utility >= top - floor && std::abs(c.report - v) < nearest) {
            nearest = std::abs(c.report - v);
            row.best_report = c.report;
            row.best_bid = c.bid;
        }
    }
    return row;
}

AuditReport finish(std::vector<AuditRow> rows, double cell, const AuditOptions& o) {
    AuditReport r;
    r.deviation_grid_size = o.deviation_grid_size;
    r.seed = o.seed;
    r.audit_tol = o.audit_tol;
    for (const auto& row : rows) {
        r.max_gain = std::max(r.max_gain, row.gain);
        if (std::abs(row.best_report - row.v) > cell * (1.0 + 1e-9)) r.argmax_near_truth = false;
    }
    r.rows = std::move(rows);
    r.passed = r.max_gain <= o.audit_tol && r.argmax_near_truth;
    return r;
}

double sample_standard_normal_truncated(std::mt19937_64& rng, double mu, double sigma, double lo, double hi) {
    static const boost::math::normal_distribution<double> std_normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double a = boost::math::cdf(std_normal, (lo - mu) / sigma);
    const double b = boost::math::cdf(std_normal, (hi - mu) / sigma);
    const double p = std::clamp(a + unif(rng) * (b - a), 1e-300, 1.0 - 1e-16);
    return std::clamp(mu + sigma * boost::math::quantile(std_normal, p), lo, hi);
}

double sample_type(std::mt19937_64& rng, const ValueModel& vm, std::size_t component) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto& dist = vm.components()[component].dist;
    if (std::holds_alternative<UniformDist>(dist)) return vm.lo() + vm.span() * unif(rng);
    if (const auto* p = std::get_if<PowerDist>(&dist))
        return vm.lo() + vm.span() * std::pow(unif(rng), 1.0 / p->k);
    const auto& tn = std::get<TruncatedNormalDist>(dist);
    return sample_standard_normal_truncated(rng, tn.mu, tn.sigma, vm.lo(), vm.hi());
}

double sample_noise(std::mt19937_64& rng, const WinPayoffSpec& w) {
    const NoiseDist* noise = w.noise();
    if (noise == nullptr) return 0.0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double eps = 0.0;
    if (const auto* d = std::get_if<DiscreteNoise>(noise)) {
        std::discrete_distribution<std::size_t> pick(d->probs.begin(), d->probs.end());
        eps = d->points[pick(rng)];
    } else if (const auto* u = std::get_if<UniformNoise>(noise)) {
        eps = u->lo + (u->hi - u->lo) * unif(rng);
    } else {
        const auto& tn = std::get<TruncatedNormalNoise>(*noise);
        eps = sample_standard_normal_truncated(rng, tn.mu, tn.sigma, tn.lo, tn.hi);
    }
    return w.scale() * eps;
}

struct Accumulator {
    std::uint64_t rounds = 0;
    long double revenue = 0, revenue_sq = 0, utility = 0, utility_sq = 0;
    std::vector<double> wins;

    void merge(const Accumulator& o) {
        rounds += o.rounds;
        revenue += o.revenue;
        revenue_sq += o.revenue_sq;
        utility += o.utility;
        utility_sq += o.utility_sq;
        for (std::size_t i = 0; i < wins.size(); ++i) wins[i] += o.wins[i];
    }
};

/// Bidder indices by decreasing bid, ties ordered uniformly at random.
std::vector<std::size_t> rank_bids(std::mt19937_64& rng, const std::vector<double>& bids) {
    std::vector<std::pair<double, std::uint64_t>> key(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) key[i] = {bids[i], rng()};
    std::vector<std::size_t> order(bids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    return order;
}

/// Runs one shard; `settle` maps (types, ranked order) to (revenue, per-bidder utility).
template <class Settle>
Accumulator run_shard(const ValueModel& vm, const BidFunction& beta, std::uint64_t rounds,
                      std::uint64_t seed, std::uint64_t shard, Settle&& settle) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<double> weights;
    for (const auto& c : vm.components()) weights.push_back(c.weight);
    std::discrete_distribution<std::size_t> pick_component(weights.begin(), weights.end());

    const auto n = static_cast<std::size_t>(vm.bidders());
    Accumulator acc;
    acc.wins.assign(n, 0.0);
    std::vector<double> types(n), bids(n), utils(n);
    for (std::uint64_t r = 0; r < rounds; ++r) {
        const std::size_t comp = vm.is_iid() ? 0 : pick_component(rng);
        for (std::size_t i = 0; i < n; ++i) {
            types[i] = sample_type(rng, vm, comp);
            bids[i] = beta(types[i]);
        }
        const auto order = rank_bids(rng, bids);
        const double revenue = settle(rng, types, bids, order, utils, acc.wins);
        const double mean_u = std::accumulate(utils.begin(), utils.end(), 0.0) / static_cast<double>(n);
        ++acc.rounds;
        acc.revenue += revenue;
        acc.revenue_sq += static_cast<long double>(revenue) * revenue;
        acc.utility += mean_u;
        acc.utility_sq += static_cast<long double>(mean_u) * mean_u;
    }
    return acc;
}

template <class Settle>
StatsReport simulate(const char* format, const ValueModel& vm, const BidFunction& beta,
                     std::uint64_t rounds, std::uint64_t seed, Settle&& settle) {
    StatsReport s;
    s.format = format;
    s.rounds = rounds;
    s.seed = seed;
    s.allocation_frequency.assign(static_cast<std::size_t>(vm.bidders()), 0.0);
    if (rounds == 0) return s;

    Accumulator total;
    total.wins.assign(s.allocation_frequency.size(), 0.0);
    const std::uint64_t shards = (rounds + kShardRounds - 1) / kShardRounds;
    for (std::uint64_t k = 0; k < shards; ++k) {
        const std::uint64_t count = std::min(kShardRounds, rounds - k * kShardRounds);
        total.merge(run_shard(vm, beta, count, seed, k, settle));
    }

    const auto N = static_cast<long double>(rounds);
    auto moments = [&](long double sum, long double sum_sq, double& mean, double& se) {
        const long double m = sum / N;
        mean = static_cast<double>(m);
        if (rounds < 2) return;
        const long double var = std::max<long double>(0, (sum_sq - N * m * m) / (N - 1));
        se = static_cast<double>(std::sqrt(var / N));
    };
    moments(total.revenue, total.revenue_sq, s.mean_revenue, s.se_revenue);
    moments(total.utility, total.utility_sq, s.mean_bidder_utility, s.se_bidder_utility);
    for (std::size_t i = 0; i < total.wins.size(); ++i)
        s.allocation_frequency[i] = total.wins[i] / static_cast<double>(rounds);
    return s;
}

}  // namespace

double fpa_report_utility(const FpaScenario& sc, const EquilibriumSolution& sol, double v, double t) {
    const Utility u(sc.utility, sc.transform);
    const double us = u(outside_value(sc.outside, v));
    const double q = win_prob(sc.values, v, t);
    if (q == 0.0) return us;
    return q * u(v - sol.bid(t)) + (1.0 - q) * us;
}

double spa_report_utility(const SpaScenario& sc, const EquilibriumSolution& sol, double v, double t) {
    const Utility u(sc.utility, sc.transform);
    const ValueModel& vm = sc.values;
    vm.require_in_support(v);
    vm.require_in_support(t);
    const double us = u(outside_value(sc.outside, v));
    auto integrand = [&](double z) {
        const double f = kth_opponent_density(vm, sc.units, v, z);
        return f == 0.0 ? 0.0 : pivotal_expectation(u, sc.win_payoff, v, sol.bid(z)) * f;
    };
    const double won = numerics::integrate_adaptive(integrand, vm.lo(), std::min(t, vm.hi()), 1e-10, 1e-13);
    return won + us * (1.0 - kth_win_prob(vm, sc.units, v, t));
}

AuditReport best_response_audit(const FpaScenario& sc, const EquilibriumSolution& sol,
                                const AuditOptions& opts) {
    require_audit_options(opts);
    const Utility u(sc.utility, sc.transform);
    const ValueModel& vm = sc.values;
    const auto devs = deviation_grid(vm, opts.deviation_grid_size);
    const double top_bid = sol.bid(vm.hi());

    std::vector<AuditRow> rows;
    for (double v : audit_types(vm, opts.type_grid_size)) {
        const double us = u(outside_value(sc.outside, v));
        auto psi = [&](double t) -> std::optional<double> {
            const double q = win_prob(vm, v, t);
            if (q == 0.0) return us;
            try {
                return q * u(v - sol.bid(t)) + (1.0 - q) * us;
            } catch (const DomainError&) {
                return std::nullopt;
            }
        };
        const auto truthful = psi(v);
        if (!truthful) throw DomainError("report utility undefined at the truthful report");

        std::vector<Candidate> cands;
        for (double t : devs)
            if (auto val = psi(t)) cands.push_back({t, sol.bid(t), *val});
        for (int k = 1; k <= kOverbidProbes; ++k) {
            const double b = top_bid + k * kProbeStep * vm.span();
            if (u.in_domain(v - b)) cands.push_back({vm.hi(), b, u(v - b)});
        }
        rows.push_back(best_of(v, *truthful, cands));
    }
    return finish(std::move(rows), vm.span() / (opts.deviation_grid_size - 1), opts);
}

AuditReport best_response_audit(const SpaScenario& sc, const EquilibriumSolution& sol,
                                const AuditOptions& opts) {
    require_audit_options(opts);
    const Utility u(sc.utility, sc.transform);
    const ValueModel& vm = sc.values;
    const auto devs = deviation_grid(vm, opts.deviation_grid_size);
    const double top_bid = sol.bid(vm.hi());
    using Rule = boost::math::quadrature::gauss<double, 10>;

    std::vector<AuditRow> rows;
    for (double v : audit_types(vm, opts.type_grid_size)) {
        const double us = u(outside_value(sc.outside, v));
        auto integrand = [&](double z) {
            const double f = kth_opponent_density(vm, sc.units, v, z);
            return f == 0.0 ? 0.0 : pivotal_expectation(u, sc.win_payoff, v, sol.bid(z)) * f;
        };

        std::vector<double> pts(devs);
        pts.insert(std::upper_bound(pts.begin(), pts.end(), v), v);

        // Cumulative report utility; stops at the first cell where W - beta(z)
        // leaves the utility domain (all later reports are skipped).
        std::vector<Candidate> cands;
        std::optional<double> truthful;
        double won = 0.0;
        bool defined = true;
        for (std::size_t k = 0; k < pts.size() && defined; ++k) {
            if (k > 0) {
                try {
                    won += Rule::integrate(integrand, pts[k - 1], pts[k]);
                } catch (const DomainError&) {
                    defined = false;
                    break;
                }
            }
            const double val = won + us * (1.0 - kth_win_prob(vm, sc.units, v, pts[k]));
            if (pts[k] == v && !truthful)
                truthful = val;
            else
                cands.push_back({pts[k], sol.bid(pts[k]), val});
        }
        if (!truthful) throw DomainError("report utility undefined at the truthful report");
        // Above beta(v_hi) the bidder always wins and still pays beta(T).
        if (defined)
            for (int k = 1; k <= kOverbidProbes; ++k)
                cands.push_back({vm.hi(), top_bid + k * kProbeStep * vm.span(), won});
        rows.push_back(best_of(v, *truthful, cands));
    }
    return finish(std::move(rows), vm.span() / (opts.deviation_grid_size - 1), opts);
}

StatsReport monte_carlo_auction(const FpaScenario& sc, const EquilibriumSolution& sol,
                                std::uint64_t rounds, std::uint64_t seed) {
    const Utility u(sc.utility, sc.transform);
    auto settle = [&](std::mt19937_64&, const std::vector<double>& types, const std::vector<double>& bids,
                      const std::vector<std::size_t>& order, std::vector<double>& utils,
                      std::vector<double>& wins) {
        const std::size_t w = order.front();
        for (std::size_t i = 0; i < types.size(); ++i)
            utils[i] = (i == w) ? u(types[i] - bids[i]) : u(outside_value(sc.outside, types[i]));
        wins[w] += 1.0;
        return bids[w];
    };
    return simulate("fpa", sc.values, sol.bid, rounds, seed, settle);
}

StatsReport monte_carlo_auction(const SpaScenario& sc, const EquilibriumSolution& sol,
                                std::uint64_t rounds, std::uint64_t seed) {
    const Utility u(sc.utility, sc.transform);
    const auto K = static_cast<std::size_t>(sc.units);
    auto settle = [&](std::mt19937_64& rng, const std::vector<double>& types, const std::vector<double>& bids,
                      const std::vector<std::size_t>& order, std::vector<double>& utils,
                      std::vector<double>& wins) {
        const double price = bids[order[K]];
        for (std::size_t i = 0; i < types.size(); ++i) utils[i] = u(outside_value(sc.outside, types[i]));
        for (std::size_t r = 0; r < K; ++r) {
            const std::size_t w = order[r];
            utils[w] = u(types[w] + sample_noise(rng, sc.win_payoff) - price);
            wins[w] += 1.0;
        }
        return static_cast<double>(K) * price;
    };
    return simulate(sc.units >= 2 ? "uniform" : "spa", sc.values, sol.bid, rounds, seed, settle);
}

}  // namespace riskbid
