// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "riskbid/errors.hpp"
#include "riskbid/utility.hpp"

namespace riskbid {

/// Absolute tolerance for payoff ties and for sup/inf comparisons.
inline constexpr double kTieTolerance = 1e-9;

/// One state of the world as seen by a single bidder.
struct StateRecord {
    double gamma = 0.0;    ///< max of the highest rival bid and the reserve
    double value = 0.0;    ///< value of the good in this state
    double outside = 0.0;  ///< payoff from losing
    bool tie_alloc_high = false;  ///< high bid gets the good when it equals gamma
    bool tie_alloc_low = false;   ///< low bid gets the good when it equals gamma
};

/// Two actions evaluated on a finite state space.
class FiniteDecisionProblem {
public:
    FiniteDecisionProblem(std::vector<double> a, std::vector<double> b);
    FiniteDecisionProblem(std::vector<StateRecord> states, std::vector<double> a,
                          std::vector<double> b);

    std::size_t size() const noexcept { return a_.size(); }
    std::span<const double> a() const noexcept { return a_; }
    std::span<const double> b() const noexcept { return b_; }
    std::span<const StateRecord> states() const noexcept { return states_; }

    /// The same problem with the roles of the two actions exchanged.
    FiniteDecisionProblem swapped() const;

private:
    std::vector<StateRecord> states_;
    std::vector<double> a_;
    std::vector<double> b_;
};

/// States where a pays strictly more (A), strictly less (B), or the same (C).
struct PartitionABC {
    std::vector<std::size_t> a_better;
    std::vector<std::size_t> b_better;
    std::vector<std::size_t> tied;
};

/// Allocation cells for two bids bid_a > bid_b.
struct AuctionPartition {
    std::vector<std::size_t> both;     ///< both bids get the good
    std::vector<std::size_t> pivotal;  ///< only the high bid gets the good
    std::vector<std::size_t> neither;  ///< neither bid gets the good
};

struct SafetyVerdict {
    bool safer = false;
    /// First (theta in A, theta' in B) breaking the cross-pair condition.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    Dominance dominance = Dominance::None;
    /// Largest amount by which a cross-pair inequality fails (<= 0 when safe).
    double violation_margin = 0.0;
};

PartitionABC partition_abc(const FiniteDecisionProblem& p);

/// Throws IdenticalActions when the actions agree in every state.
Dominance check_dominance(const FiniteDecisionProblem& p);

/// Verdict without the non-dominance precondition: a dominated pair comes
/// back with `dominance` set and `safer` false.
SafetyVerdict classify_safety(const FiniteDecisionProblem& p);

/// Is action a safer than action b? Throws DominancePrecondition when one
/// action dominates the other.
SafetyVerdict is_safer(const FiniteDecisionProblem& p);

/// Violation margin over all cross pairs; +inf-free, -inf when A or B is empty.
double violation_margin(const FiniteDecisionProblem& p);

// ---------------------------------------------------------------------------
// Belief-set probes
// ---------------------------------------------------------------------------

struct ProbeReport {
    bool holds = true;
    std::optional<std::vector<double>> counterexample;
    std::size_t beliefs_checked = 0;
    std::size_t beliefs_preferring_a = 0;
};

/// Checks P_{a,b}(a) subset of P-hat_{a,b}(a) on the supplied beliefs, where
/// the hat preferences use phi o u.
ProbeReport belief_inclusion_probe(const FiniteDecisionProblem& p, const UtilitySpec& u,
                                   const TransformSpec& phi,
                                   std::span<const std::vector<double>> beliefs);

/// Symmetric Dirichlet(1,...,1) draws plus every vertex and edge midpoint of
/// the simplex over `states` states.
std::vector<std::vector<double>> sample_beliefs(std::size_t states, std::size_t draws,
                                                std::uint64_t seed);

struct ViolationWitness {
    std::vector<double> belief;
    TransformSpec transform;
    std::size_t state_a = 0;   ///< theta in A
    std::size_t state_b = 0;   ///< theta' in B
};

/// Searches two-point beliefs and single-kink concave transforms for a belief
/// that prefers a under u but not under phi o u. Throws PreconditionError if
/// a is safer than b or the pair is dominated.
std::optional<ViolationWitness> find_violation_witness(const FiniteDecisionProblem& p,
                                                       const UtilitySpec& u);

// ---------------------------------------------------------------------------
// Auction bid comparisons
// ---------------------------------------------------------------------------

enum class BidRole { High, Low };

/// Does a bid get the good in state s? `role` selects the tie flag.
bool gets_good(double bid, const StateRecord& s, BidRole role);

/// Throws BidOrderError unless bid_a > bid_b (beyond the tie tolerance).
AuctionPartition auction_partition(double bid_a, double bid_b, std::span<const StateRecord> states);

/// First price: v - bid when winning, s when losing.
std::vector<double> fpa_payoffs(double bid, std::span<const StateRecord> states,
                                BidRole role = BidRole::High);

/// Second price: v - gamma when winning, s when losing.
std::vector<double> spa_payoffs(double bid, std::span<const StateRecord> states,
                                BidRole role = BidRole::High);

/// inf over states of (v - bid_a) >= sup over states of s.
bool check_winning_cannot_hurt(double bid_a, std::span<const StateRecord> states);

/// inf over B of (v - bid_b) >= sup over A of (v - bid_a); vacuous if A or B is empty.
bool check_low_bids_better_winners(double bid_a, double bid_b, std::span<const StateRecord> states,
                                   const PartitionABC& partition);

struct FpaBidComparison {
    AuctionPartition cells;
    PartitionABC partition;
    SafetyVerdict verdict;  ///< is the higher bid safer?
    bool winning_cannot_hurt = false;
    bool low_bids_better_winners = false;
    bool wins_cover_outside = false;  ///< inf_B (v - a) >= sup_A s
    bool cheap_side_covers_wins = false;  ///< min(inf_both (v - b), inf_{B & pivotal} s) >= sup_A (v - a)
};

/// Higher-bid safety under first-price rules.
FpaBidComparison fpa_higher_bid_safer(double bid_a, double bid_b, std::span<const StateRecord> states);

struct SpaBidComparison {
    AuctionPartition cells;
    PartitionABC partition;  ///< computed for (a payoffs, b payoffs)
    SafetyVerdict verdict;   ///< is the lower bid safer?
    bool known_outside = false;
};

/// Lower-bid safety under second-price rules. With `require_known_outside`,
/// throws OutsideOptionNotConstant unless s is the same in every pivotal state.
SpaBidComparison spa_lower_bid_safer(double bid_a, double bid_b, std::span<const StateRecord> states,
                                     bool require_known_outside = true);

}  // namespace riskbid
