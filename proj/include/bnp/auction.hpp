#pragma once

#include <cstddef>
#include <vector>

#include "bnp/bid.hpp"

namespace bnp {

// Sorted copy of the pool: amount descending, tx_id ascending among equals.
[[nodiscard]] std::vector<Bid> sort_bids_descending(const Mempool& pool,
                                                    TieBreak tie_break = TieBreak::ByTxIdAscending);

// Amounts of the sorted bids, zero-padded to exactly 2n entries. Positions
// past 2n never enter clearing or revenue, so larger pools are cut there.
[[nodiscard]] std::vector<Amount> pad_to_two_n(const std::vector<Bid>& sorted, std::size_t n);

// One round of the burning n-th price auction: the top n bids win and each
// pays the n-th highest amount; the next n amounts go to the miner and the
// remainder of what winners paid is burned. Losing real bids are deferred to
// the next round.
[[nodiscard]] AuctionOutcome run_auction(const Mempool& pool, const AuctionParams& params);

// Priority-fee total the block producer receives from one outcome.
[[nodiscard]] Amount miner_payoff(const AuctionOutcome& outcome);

// Single-round user payoff: value minus clearing price when included, zero
// otherwise.
[[nodiscard]] Payoff user_payoff(Amount true_value, bool included, Amount clearing_price) noexcept;

}  // namespace bnp
