#include "bnp/synthetic.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace bnp::synthetic {

Mempool random_mempool(std::mt19937_64& rng, const PoolSpec& spec) {
    Mempool pool;
    std::size_t min_size = spec.min_size;
    if (spec.congested_only) min_size = std::max(min_size, 2 * spec.n);
    const std::size_t max_size = std::max(min_size, spec.max_size);
    std::uniform_int_distribution<std::size_t> pick_size(min_size, max_size);
    const std::size_t size = pick_size(rng);

    std::uniform_int_distribution<Amount> pick_amount(spec.min_amount, spec.max_amount);
    std::unordered_set<Amount> used;
    for (std::size_t i = 0; i < size; ++i) {
        Amount amount = pick_amount(rng);
        if (spec.distinct_amounts) {
            // The callers keep size well under the amount range, so a few
            // redraws always find a free value.
            while (!used.insert(amount).second) amount = pick_amount(rng);
        }
        const std::string suffix = std::to_string(i);
        pool.bids.push_back({"t" + suffix, "u" + suffix, amount, amount, BidOrigin::Genuine});
    }
    return pool;
}

ArrivalGenerator poisson_arrivals(std::uint64_t seed, double rate, Amount min_amount,
                                  Amount max_amount) {
    return [seed, rate, min_amount, max_amount](std::uint64_t round) {
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + round);
        std::poisson_distribution<int> pick_count(rate);
        std::uniform_int_distribution<Amount> pick_amount(min_amount, max_amount);
        const int count = pick_count(rng);
        std::vector<Bid> arrivals;
        arrivals.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const Amount amount = pick_amount(rng);
            const std::string suffix = "r" + std::to_string(round) + "n" + std::to_string(i);
            arrivals.push_back({"t" + suffix, "u" + suffix, amount, amount, BidOrigin::Genuine});
        }
        return arrivals;
    };
}

std::vector<BlockRecord> synthetic_blocks(std::uint64_t seed, std::uint64_t first_block,
                                          std::size_t count, std::size_t n,
                                          std::size_t pending_count) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Amount> pick_amount(1, 100);

    std::vector<BlockRecord> records;
    records.reserve(count);
    for (std::size_t b = 0; b < count; ++b) {
        BlockRecord record;
        record.block_number = first_block + b;
        record.timestamp = 1'600'000'000ULL + 12 * (first_block + b);
        record.capacity_n = n;

        // Draw one demand pool, then seal the top n of it as the block's txs
        // so the record looks like a block actually mined from that pool.
        std::vector<TxRecord> demand;
        const std::size_t total = std::max(pending_count, n);
        for (std::size_t i = 0; i < total; ++i) {
            TxRecord tx;
            tx.tx_id = "b" + std::to_string(record.block_number) + "x" + std::to_string(i);
            tx.sender = "s" + std::to_string(i % (total / 2 + 1));
            tx.bid_amount = pick_amount(rng);
            tx.baseline_paid = tx.bid_amount;
            demand.push_back(std::move(tx));
        }
        std::vector<TxRecord> sorted = demand;
        std::stable_sort(sorted.begin(), sorted.end(), [](const TxRecord& a, const TxRecord& b) {
            return a.bid_amount > b.bid_amount;
        });
        record.txs.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n));
        record.pending_pool = std::move(demand);
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace bnp::synthetic
