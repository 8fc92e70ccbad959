#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bnp/dataset.hpp"
#include "bnp/future_cost.hpp"

namespace bnp::synthetic {

struct PoolSpec {
    std::size_t n = 3;
    std::size_t min_size = 0;
    std::size_t max_size = 12;
    Amount min_amount = 0;
    Amount max_amount = 1'000'000'000'000ULL;
    bool distinct_amounts = false;
    bool congested_only = false;  // force size >= 2n
};

// Seeded random pool; tx ids t0, t1, ... with one bidder per bid (u0, u1,
// ...) and true_value equal to the bid amount.
[[nodiscard]] Mempool random_mempool(std::mt19937_64& rng, const PoolSpec& spec);

// Independent per-round arrival stream, deterministic for a given seed:
// Poisson(rate) bids per round, amounts uniform in [min_amount, max_amount].
[[nodiscard]] ArrivalGenerator poisson_arrivals(std::uint64_t seed, double rate, Amount min_amount,
                                                Amount max_amount);

// Synthetic congested block records for fixtures and simulations: capacity n,
// n sealed txs, pending pool of pending_count bids, seeded.
[[nodiscard]] std::vector<BlockRecord> synthetic_blocks(std::uint64_t seed, std::uint64_t first_block,
                                                        std::size_t count, std::size_t n,
                                                        std::size_t pending_count);

}  // namespace bnp::synthetic
