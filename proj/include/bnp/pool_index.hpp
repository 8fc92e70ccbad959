#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "bnp/auction.hpp"

namespace bnp {

// Order statistics of one pool under the standard ordering, with O(log k)
// exact evaluation of single-bid edits. Statistic positions are 1-based to
// match the case analysis; stat(j) is zero past the end of the pool, which is
// exactly the zero padding the mechanism applies.
class PoolIndex {
public:
    PoolIndex(const Mempool& pool, const AuctionParams& params);

    [[nodiscard]] std::size_t size() const noexcept { return amounts_.size(); }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }

    [[nodiscard]] Amount stat(std::size_t j) const noexcept;      // 1-based
    [[nodiscard]] Amount clearing() const noexcept { return stat(n_); }
    [[nodiscard]] std::uint64_t window_sum() const noexcept;      // stats n+1 .. 2n
    [[nodiscard]] std::uint64_t range_sum(std::size_t lo, std::size_t hi) const noexcept;

    // Sorted position (0-based) of pool.bids[bid_index], and back.
    [[nodiscard]] std::size_t position_of(std::size_t bid_index) const noexcept;
    [[nodiscard]] std::size_t bid_at(std::size_t position) const noexcept;

    // Order statistic (1-based) of the pool with the bid at sorted position p
    // removed.
    [[nodiscard]] Amount stat_without(std::size_t p, std::size_t j) const noexcept;

    struct EditEval {
        bool included = false;      // the edited or injected bid wins
        Amount clearing = 0;        // n-th statistic of the edited pool
        std::uint64_t window = 0;   // statistics n+1 .. 2n of the edited pool
        std::size_t position = 0;   // 0-based sorted position of the edited bid
    };

    // Pool with the bid at sorted position p re-priced to new_amount, same id.
    [[nodiscard]] EditEval eval_replace(std::size_t p, Amount new_amount) const;
    // Pool plus one extra bid (new_amount, id).
    [[nodiscard]] EditEval eval_inject(Amount new_amount, std::string_view id) const;

private:
    // Number of pool bids strictly preceding (amount, id) in the ordering.
    [[nodiscard]] std::size_t insert_position(Amount amount, std::string_view id) const;
    // Sum of the first count entries of the sorted amounts with index
    // `removed` skipped; pass size() as `removed` to skip nothing.
    [[nodiscard]] std::uint64_t prefix_without(std::size_t count, std::size_t removed) const noexcept;
    [[nodiscard]] EditEval eval_edited(std::size_t removed, std::size_t q, Amount v) const noexcept;

    const Mempool* pool_;
    std::size_t n_;
    std::vector<std::uint32_t> order_;   // bid indices, sorted
    std::vector<Amount> amounts_;        // amounts in sorted order
    std::vector<std::uint64_t> prefix_;  // prefix_[i] = sum of first i amounts
    std::vector<std::uint32_t> pos_of_;  // bid index -> sorted position
};

}  // namespace bnp
