#include "bnp/auction.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "bnp/errors.hpp"

namespace bnp {

bool bid_precedes(const Bid& a, const Bid& b) noexcept {
    if (a.amount != b.amount) return a.amount > b.amount;
    return a.tx_id < b.tx_id;
}

void validate_params(const AuctionParams& params) {
    if (params.n == 0) throw ValidationError("auction capacity n must be at least 1");
}

void validate_mempool(const Mempool& pool) {
    std::vector<const std::string*> ids;
    ids.reserve(pool.bids.size());
    for (const Bid& bid : pool.bids) {
        if (bid.tx_id.empty()) throw ValidationError("bid with empty tx_id");
        ids.push_back(&bid.tx_id);
    }
    std::sort(ids.begin(), ids.end(), [](const auto* a, const auto* b) { return *a < *b; });
    auto dup = std::adjacent_find(ids.begin(), ids.end(),
                                  [](const auto* a, const auto* b) { return *a == *b; });
    if (dup != ids.end()) throw ValidationError("duplicate tx_id: " + **dup);
}

std::vector<Bid> sort_bids_descending(const Mempool& pool, TieBreak) {
    std::vector<Bid> sorted = pool.bids;
    std::sort(sorted.begin(), sorted.end(), bid_precedes);
    return sorted;
}

std::vector<Amount> pad_to_two_n(const std::vector<Bid>& sorted, std::size_t n) {
    std::vector<Amount> padded(2 * n, 0);
    const std::size_t take = std::min(sorted.size(), padded.size());
    for (std::size_t i = 0; i < take; ++i) padded[i] = sorted[i].amount;
    return padded;
}

AuctionOutcome run_auction(const Mempool& pool, const AuctionParams& params) {
    validate_params(params);
    validate_mempool(pool);

    const std::size_t k = pool.bids.size();
    const std::size_t n = params.n;

    std::vector<std::uint32_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
        return bid_precedes(pool.bids[x], pool.bids[y]);
    });

    AuctionOutcome out;
    out.clearing_price = (k >= n) ? pool.bids[order[n - 1]].amount : 0;

    const std::size_t window_end = std::min(k, 2 * n);
    std::uint64_t revenue = 0;
    for (std::size_t p = n; p < window_end; ++p) revenue += pool.bids[order[p]].amount;
    out.miner_revenue = revenue;

    const std::size_t winner_count = std::min(k, n);
    out.total_collected = static_cast<Amount>(winner_count) * out.clearing_price;
    out.burned = out.total_collected - out.miner_revenue;

    out.winners.reserve(winner_count);
    for (std::size_t p = 0; p < winner_count; ++p) {
        const Bid& bid = pool.bids[order[p]];
        out.winners.push_back({bid.tx_id, out.clearing_price, bid.amount - out.clearing_price});
    }

    out.deferred.round = pool.round + 1;
    out.deferred.bids.reserve(k - winner_count);
    for (std::size_t p = winner_count; p < k; ++p) out.deferred.bids.push_back(pool.bids[order[p]]);

    return out;
}

Amount miner_payoff(const AuctionOutcome& outcome) {
    return outcome.miner_revenue;
}

Payoff user_payoff(Amount true_value, bool included, Amount clearing_price) noexcept {
    if (!included) return 0;
    return as_payoff(true_value) - as_payoff(clearing_price);
}

}  // namespace bnp
