#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bnp/auction.hpp"
#include "bnp/future_cost.hpp"

namespace bnp {

enum class DeviationKind {
    Overbid,
    Underbid,
    FakeUserBid,
    MinerFakeBid,
    Collusion,
};

// One concrete single-actor deviation from honest play in a given round.
// altered_bids maps tx_id to the amount submitted instead of the honest one;
// injected_bids are extra transactions entering the pool (fakes, which carry
// no true value, or raised coalition copies).
struct DeviationScenario {
    DeviationKind kind = DeviationKind::Overbid;
    // The bidder_id whose two-round payoff is scored, or "miner" for the
    // round's block producer.
    std::string actor;
    std::map<std::string, Amount> altered_bids;
    std::vector<Bid> injected_bids;
    std::string case_label;
    std::uint64_t round = 0;
};

struct ScenarioResult {
    Payoff honest_payoff = 0;
    Payoff deviant_payoff = 0;
    Payoff delta = 0;  // deviant minus honest
    std::string case_label;
    // The future-inclusion fee actually charged in the deviated world, zero
    // when everything settled within the horizon.
    Amount future_fee_charged = 0;
};

// Names the region of the single-bid deviation space that new_amount lands
// in, using the honest clearing price and the deviator's true value. Pure
// arithmetic on the honest ordering; it never re-runs the auction.
[[nodiscard]] std::string classify_user_deviation(const Mempool& pool, const std::string& tx_id,
                                                  Amount new_amount, const AuctionParams& params);

// The one scoring engine. Plays the honest world and the deviated world over
// a two-round horizon and returns the actor's payoff difference. Every
// evaluate_* wrapper below builds a scenario and calls this.
[[nodiscard]] ScenarioResult evaluate_scenario(const Mempool& pool, const DeviationScenario& scenario,
                                               const AuctionParams& params, const FutureCostModel& model);

// Bidder moves one owned bid to new_amount. Throws UnknownTxError,
// MissingTrueValueError, or NotADeviationError.
[[nodiscard]] ScenarioResult evaluate_user_deviation(const Mempool& pool, const std::string& tx_id,
                                                     Amount new_amount, const AuctionParams& params,
                                                     const FutureCostModel& model);

// Miner injects one value-less fake bid at fake_amount. Throws
// DominatedBidError when the fake sits below the padded window floor.
[[nodiscard]] ScenarioResult evaluate_miner_fake_bid(const Mempool& pool, Amount fake_amount,
                                                     const AuctionParams& params,
                                                     const FutureCostModel& model);

struct CollusionMember {
    std::string tx_id;
    Amount raised_amount;
};

// Miner-led coalition: each member's bid is raised to raised_amount and the
// coalition's joint payoff (miner revenue plus member payoffs, minus side
// costs) is scored against honest play. Throws AlreadyWinningError when a
// member already wins honestly, ValidationError when a raise lowers a bid.
[[nodiscard]] ScenarioResult evaluate_collusion(const Mempool& pool,
                                                const std::vector<CollusionMember>& members,
                                                const AuctionParams& params,
                                                const FutureCostModel& model);

struct SimulationResult {
    std::vector<AuctionOutcome> rounds;
    // Cumulative payoffs keyed by bidder_id; each round's block producer is
    // the separate actor "miner:r<round>".
    std::map<std::string, Payoff> ledger;
};

// Multi-round play: each round clears the pool, defers the losers, merges
// arrivals, and credits the ledger. interventions apply in their stated
// round. A value-less bid still pending at the horizon is charged the
// pessimistic fallback (the clearing price of the round it entered in); a
// genuine pending bid scores zero.
[[nodiscard]] SimulationResult simulate_rounds(const Mempool& initial, const ArrivalGenerator& arrivals,
                                               const AuctionParams& params, std::uint64_t rounds,
                                               const std::vector<DeviationScenario>& interventions = {});

// Fake-bid ids sort ahead of every genuine id so a fake tied at the clearing
// boundary deterministically wins its slot.
[[nodiscard]] std::string make_fake_tx_id(std::uint64_t k);

}  // namespace bnp
