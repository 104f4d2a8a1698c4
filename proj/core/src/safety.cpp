// SPDX-License-Identifier: Apache-2.0
#include "riskbid/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace riskbid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbeSlack = 1e-12;

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidProblem(std::string(what) + " contains a non-finite payoff");
}

bool contains(const std::vector<std::size_t>& set, std::size_t i) {
    return std::binary_search(set.begin(), set.end(), i);
}

void require_bid_order(double bid_a, double bid_b) {
    if (!std::isfinite(bid_a) || !std::isfinite(bid_b) || !(bid_a > bid_b + kTieTolerance)) {
        std::ostringstream os;
        os << "bid_a must exceed bid_b (got " << bid_a << " vs " << bid_b << ")";
        throw BidOrderError(os.str());
    }
}

double expected(std::span<const double> belief, std::span<const double> utils) {
    double acc = 0.0;
    for (std::size_t i = 0; i < belief.size(); ++i) acc += belief[i] * utils[i];
    return acc;
}

struct CrossPair {
    std::size_t theta;
    std::size_t theta_prime;
    double margin;
};

/// max(a_theta - b_theta', b_theta - a_theta'); positive means the pair
/// breaks the safety condition.
double pair_margin(const FiniteDecisionProblem& p, std::size_t th, std::size_t thp) {
    return std::max(p.a()[th] - p.b()[thp], p.b()[th] - p.a()[thp]);
}

}  // namespace

// ---------------------------------------------------------------------------

FiniteDecisionProblem::FiniteDecisionProblem(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.empty()) throw InvalidProblem("decision problem needs at least one state");
    if (a_.size() != b_.size()) throw InvalidProblem("payoff vectors differ in length");
    require_finite(a_, "action a");
    require_finite(b_, "action b");
}

FiniteDecisionProblem::FiniteDecisionProblem(std::vector<StateRecord> states, std::vector<double> a,
                                             std::vector<double> b)
    : FiniteDecisionProblem(std::move(a), std::move(b)) {
    if (states.size() != a_.size()) throw InvalidProblem("payoff vectors must match the state list");
    states_ = std::move(states);
}

FiniteDecisionProblem FiniteDecisionProblem::swapped() const {
    if (states_.empty()) return FiniteDecisionProblem(b_, a_);
    return FiniteDecisionProblem(states_, b_, a_);
}

PartitionABC partition_abc(const FiniteDecisionProblem& p) {
    PartitionABC out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p.a()[i] - p.b()[i];
        if (diff > kTieTolerance)
            out.a_better.push_back(i);
        else if (diff < -kTieTolerance)
            out.b_better.push_back(i);
        else
            out.tied.push_back(i);
    }
    return out;
}

Dominance check_dominance(const FiniteDecisionProblem& p) {
    const auto part = partition_abc(p);
    if (part.a_better.empty() && part.b_better.empty())
        throw IdenticalActions("actions pay the same in every state");
    if (part.b_better.empty()) return Dominance::ADominatesB;
    if (part.a_better.empty()) return Dominance::BDominatesA;
    return Dominance::None;
}

double violation_margin(const FiniteDecisionProblem& p) {
    const auto part = partition_abc(p);
    double worst = -kInf;
    for (auto th : part.a_better)
        for (auto thp : part.b_better) worst = std::max(worst, pair_margin(p, th, thp));
    return worst;
}

SafetyVerdict classify_safety(const FiniteDecisionProblem& p) {
    SafetyVerdict v;
    v.dominance = check_dominance(p);
    if (v.dominance != Dominance::None) return v;

    const auto part = partition_abc(p);
    v.safer = true;
    v.violation_margin = -kInf;
    for (auto th : part.a_better) {
        for (auto thp : part.b_better) {
            const bool ok = p.b()[thp] >= p.a()[th] - kTieTolerance &&
                            p.a()[thp] >= p.b()[th] - kTieTolerance;
            v.violation_margin = std::max(v.violation_margin, pair_margin(p, th, thp));
            if (!ok && v.safer) {
                v.safer = false;
                v.witness = std::make_pair(th, thp);
            }
        }
    }
    return v;
}

SafetyVerdict is_safer(const FiniteDecisionProblem& p) {
    SafetyVerdict v = classify_safety(p);
    if (v.dominance != Dominance::None)
        throw DominancePrecondition(v.dominance, std::string("safety is undefined for a dominated pair (") +
                                                     to_string(v.dominance) + ")");
    return v;
}

// ---------------------------------------------------------------------------

ProbeReport belief_inclusion_probe(const FiniteDecisionProblem& p, const UtilitySpec& u,
                                   const TransformSpec& phi,
                                   std::span<const std::vector<double>> beliefs) {
    const std::size_t n = p.size();
    std::vector<double> ua(n), ub(n), hua(n), hub(n);
    for (std::size_t i = 0; i < n; ++i) {
        ua[i] = eval_utility(u, p.a()[i]);
        ub[i] = eval_utility(u, p.b()[i]);
        hua[i] = eval_utility(phi.shape, ua[i]);
        hub[i] = eval_utility(phi.shape, ub[i]);
    }

    ProbeReport report;
    for (const auto& mu : beliefs) {
        if (mu.size() != n) throw InvalidProblem("belief length does not match the state count");
        ++report.beliefs_checked;
        if (expected(mu, ua) < expected(mu, ub)) continue;
        ++report.beliefs_preferring_a;
        if (expected(mu, hua) < expected(mu, hub) - kProbeSlack) {
            report.holds = false;
            report.counterexample = mu;
            return report;
        }
    }
    return report;
}

std::vector<std::vector<double>> sample_beliefs(std::size_t states, std::size_t draws,
                                                std::uint64_t seed) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < states; ++i) {
        std::vector<double> e(states, 0.0);
        e[i] = 1.0;
        out.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < states; ++i) {
        for (std::size_t j = i + 1; j < states; ++j) {
            std::vector<double> m(states, 0.0);
            m[i] = m[j] = 0.5;
            out.push_back(std::move(m));
        }
    }
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo(1.0);
    for (std::size_t d = 0; d < draws; ++d) {
        std::vector<double> g(states);
        double total = 0.0;
        for (auto& x : g) total += (x = expo(rng));
        for (auto& x : g) x /= total;
        out.push_back(std::move(g));
    }
    return out;
}

std::optional<ViolationWitness> find_violation_witness(const FiniteDecisionProblem& p,
                                                       const UtilitySpec& u) {
    const SafetyVerdict verdict = classify_safety(p);
    if (verdict.dominance != Dominance::None)
        throw PreconditionError("witness search needs a non-dominated pair");
    if (verdict.safer) throw PreconditionError("a is safer than b; no violation witness exists");

    const auto part = partition_abc(p);
    std::vector<CrossPair> pairs;
    for (auto th : part.a_better)
        for (auto thp : part.b_better) {
            const double m = pair_margin(p, th, thp);
            if (m > kTieTolerance) pairs.push_back({th, thp, m});
        }
    // The reported witness first, then the rest by decreasing margin.
    std::stable_sort(pairs.begin(), pairs.end(), [&](const CrossPair& x, const CrossPair& y) {
        const bool xw = verdict.witness && x.theta == verdict.witness->first &&
                        x.theta_prime == verdict.witness->second;
        const bool yw = verdict.witness && y.theta == verdict.witness->first &&
                        y.theta_prime == verdict.witness->second;
        if (xw != yw) return xw;
        return x.margin > y.margin;
    });

    static constexpr double kRatios[] = {2.0, 5.0, 10.0, 100.0};
    for (const auto& pr : pairs) {
        // Utility levels of the two cross states.
        const double a_hi = eval_utility(u, p.a()[pr.theta]);
        const double a_lo = eval_utility(u, p.b()[pr.theta]);
        const double b_lo = eval_utility(u, p.a()[pr.theta_prime]);
        const double b_hi = eval_utility(u, p.b()[pr.theta_prime]);
        const double gain = a_hi - a_lo, loss = b_hi - b_lo;

        for (double kink : {a_lo, a_hi, b_lo, b_hi}) {
            for (double ratio : kRatios) {
                TransformSpec phi{UtilitySpec{PiecewiseLinear{{{kink - 1.0, 1.0}, {kink, 1.0 / ratio}}}, 0.0}};
                const double gain_hat = eval_utility(phi.shape, a_hi) - eval_utility(phi.shape, a_lo);
                const double loss_hat = eval_utility(phi.shape, b_hi) - eval_utility(phi.shape, b_lo);
                // mu = (q on theta, 1-q on theta'): a preferred under u iff odds >= loss/gain.
                const double odds_lo = loss / gain;
                const double odds_hi = loss_hat / gain_hat;
                if (!(odds_hi > odds_lo * (1.0 + 1e-9))) continue;
                const double odds = std::sqrt(odds_lo * odds_hi);
                const double q = odds / (1.0 + odds);

                std::vector<double> mu(p.size(), 0.0);
                mu[pr.theta] = q;
                mu[pr.theta_prime] = 1.0 - q;
                const std::vector<std::vector<double>> one{mu};
                const auto probe = belief_inclusion_probe(p, u, phi, one);
                if (!probe.holds) return ViolationWitness{mu, phi, pr.theta, pr.theta_prime};
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

bool gets_good(double bid, const StateRecord& s, BidRole role) {
    if (bid > s.gamma + kTieTolerance) return true;
    if (bid < s.gamma - kTieTolerance) return false;
    return role == BidRole::High ? s.tie_alloc_high : s.tie_alloc_low;
}

AuctionPartition auction_partition(double bid_a, double bid_b, std::span<const StateRecord> states) {
    require_bid_order(bid_a, bid_b);
    AuctionPartition out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const bool wins_a = gets_good(bid_a, states[i], BidRole::High);
        const bool wins_b = gets_good(bid_b, states[i], BidRole::Low);
        if (wins_b && !wins_a) {
            std::ostringstream os;
            os << "state " << i << ": low bid wins while high bid loses (non-monotone tie flags)";
            throw InvalidProblem(os.str());
        }
        if (wins_b)
            out.both.push_back(i);
        else if (wins_a)
            out.pivotal.push_back(i);
        else
            out.neither.push_back(i);
    }
    return out;
}

std::vector<double> fpa_payoffs(double bid, std::span<const StateRecord> states, BidRole role) {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(gets_good(bid, s, role) ? s.value - bid : s.outside);
    return out;
}

std::vector<double> spa_payoffs(double bid, std::span<const StateRecord> states, BidRole role) {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(gets_good(bid, s, role) ? s.value - s.gamma : s.outside);
    return out;
}

bool check_winning_cannot_hurt(double bid_a, std::span<const StateRecord> states) {
    double worst_win = kInf, best_outside = -kInf;
    for (const auto& s : states) {
        worst_win = std::min(worst_win, s.value - bid_a);
        best_outside = std::max(best_outside, s.outside);
    }
    return worst_win >= best_outside - kTieTolerance;
}

bool check_low_bids_better_winners(double bid_a, double bid_b, std::span<const StateRecord> states,
                                   const PartitionABC& partition) {
    if (partition.a_better.empty() || partition.b_better.empty()) return true;
    double inf_b = kInf, sup_a = -kInf;
    for (auto i : partition.b_better) inf_b = std::min(inf_b, states[i].value - bid_b);
    for (auto i : partition.a_better) sup_a = std::max(sup_a, states[i].value - bid_a);
    return inf_b >= sup_a - kTieTolerance;
}

FpaBidComparison fpa_higher_bid_safer(double bid_a, double bid_b, std::span<const StateRecord> states) {
    FpaBidComparison out;
    out.cells = auction_partition(bid_a, bid_b, states);
    std::vector<StateRecord> st(states.begin(), states.end());
    FiniteDecisionProblem problem(st, fpa_payoffs(bid_a, states, BidRole::High),
                                  fpa_payoffs(bid_b, states, BidRole::Low));
    out.partition = partition_abc(problem);

    for (auto i : out.partition.a_better)
        if (!contains(out.cells.pivotal, i))
            throw std::logic_error("first price: a state in A lies outside the pivotal cell");
    for (auto i : out.cells.both)
        if (!contains(out.partition.b_better, i))
            throw std::logic_error("first price: a both-win state is not in B");
    for (auto i : out.cells.neither)
        if (!contains(out.partition.tied, i))
            throw std::logic_error("first price: a both-lose state is not in C");

    out.verdict = is_safer(problem);
    out.winning_cannot_hurt = check_winning_cannot_hurt(bid_a, states);
    out.low_bids_better_winners = check_low_bids_better_winners(bid_a, bid_b, states, out.partition);

    double inf_b_win_a = kInf, sup_a_outside = -kInf, sup_a_win = -kInf, inf_b_side = kInf;
    for (auto i : out.partition.b_better) {
        inf_b_win_a = std::min(inf_b_win_a, states[i].value - bid_a);
        inf_b_side = std::min(inf_b_side, contains(out.cells.pivotal, i) ? states[i].outside
                                                                          : states[i].value - bid_b);
    }
    for (auto i : out.partition.a_better) {
        sup_a_outside = std::max(sup_a_outside, states[i].outside);
        sup_a_win = std::max(sup_a_win, states[i].value - bid_a);
    }
    out.wins_cover_outside = inf_b_win_a >= sup_a_outside - kTieTolerance;
    out.cheap_side_covers_wins = inf_b_side >= sup_a_win - kTieTolerance;

    if (out.verdict.safer != (out.wins_cover_outside && out.cheap_side_covers_wins))
        throw std::logic_error("first price: safety verdict disagrees with its cross-pair conditions");
    if (out.winning_cannot_hurt && out.low_bids_better_winners && !out.verdict.safer)
        throw std::logic_error("first price: sufficient conditions hold but the higher bid is not safer");
    return out;
}

SpaBidComparison spa_lower_bid_safer(double bid_a, double bid_b, std::span<const StateRecord> states,
                                     bool require_known_outside) {
    SpaBidComparison out;
    out.cells = auction_partition(bid_a, bid_b, states);
    std::vector<StateRecord> st(states.begin(), states.end());
    FiniteDecisionProblem problem(st, spa_payoffs(bid_a, states, BidRole::High),
                                  spa_payoffs(bid_b, states, BidRole::Low));
    out.partition = partition_abc(problem);

    for (const auto* cell : {&out.cells.both, &out.cells.neither})
        for (auto i : *cell)
            if (!contains(out.partition.tied, i))
                throw std::logic_error("second price: a both-win or both-lose state is not in C");

    out.known_outside = true;
    for (auto i : out.cells.pivotal)
        if (std::abs(states[i].outside - states[out.cells.pivotal.front()].outside) > kTieTolerance)
            out.known_outside = false;
    if (require_known_outside && !out.known_outside)
        throw OutsideOptionNotConstant("outside option varies across pivotal states");

    out.verdict = is_safer(problem.swapped());
    if (out.known_outside && !out.verdict.safer)
        throw std::logic_error("second price: known outside option but the lower bid is not safer");
    return out;
}

}  // namespace riskbid
