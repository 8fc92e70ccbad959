#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnp/amount.hpp"

namespace bnp {

enum class BidOrigin {
    Genuine,
    MinerFake,
    ColluderRaised,
};

struct Bid {
    std::string tx_id;
    std::string bidder_id;
    Amount amount = 0;
    // Valuation used for payoff scoring. Fake bids carry no valuation: they
    // produce costs, never surplus.
    std::optional<Amount> true_value;
    BidOrigin origin = BidOrigin::Genuine;
};

struct Mempool {
    std::vector<Bid> bids;
    std::uint64_t round = 0;
};

enum class TieBreak {
    ByTxIdAscending,
};

struct AuctionParams {
    std::size_t n = 1;
    TieBreak tie_break = TieBreak::ByTxIdAscending;
};

struct WinnerEntry {
    std::string tx_id;
    Amount paid = 0;
    Amount refund = 0;
};

struct AuctionOutcome {
    // Winners in clearing order: amount descending, tx_id ascending on ties.
    std::vector<WinnerEntry> winners;
    Amount clearing_price = 0;
    Amount miner_revenue = 0;
    Amount burned = 0;
    Amount total_collected = 0;
    // Every real bid that did not win, queued for the next round.
    Mempool deferred;
};

// The one ordering used everywhere: amount descending, tx_id ascending among
// equal amounts.
[[nodiscard]] bool bid_precedes(const Bid& a, const Bid& b) noexcept;

// Throws ValidationError on duplicate tx ids or a zero-id bid.
void validate_mempool(const Mempool& pool);

void validate_params(const AuctionParams& params);

}  // namespace bnp
