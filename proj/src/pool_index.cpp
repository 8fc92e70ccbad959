#include "bnp/pool_index.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace bnp {

PoolIndex::PoolIndex(const Mempool& pool, const AuctionParams& params)
    : pool_(&pool), n_(params.n) {
    validate_params(params);
    const std::size_t k = pool.bids.size();
    order_.resize(k);
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
        return bid_precedes(pool.bids[a], pool.bids[b]);
    });
    amounts_.resize(k);
    pos_of_.resize(k);
    prefix_.assign(k + 1, 0);
    for (std::size_t i = 0; i < k; ++i) {
        amounts_[i] = pool.bids[order_[i]].amount;
        prefix_[i + 1] = prefix_[i] + amounts_[i];
        pos_of_[order_[i]] = static_cast<std::uint32_t>(i);
    }
}

Amount PoolIndex::stat(std::size_t j) const noexcept {
    return (j >= 1 && j <= amounts_.size()) ? amounts_[j - 1] : 0;
}

std::uint64_t PoolIndex::range_sum(std::size_t lo, std::size_t hi) const noexcept {
    lo = std::max<std::size_t>(lo, 1);
    hi = std::min(hi, amounts_.size());
    if (hi < lo) return 0;
    return prefix_[hi] - prefix_[lo - 1];
}

std::uint64_t PoolIndex::window_sum() const noexcept {
    return range_sum(n_ + 1, 2 * n_);
}

std::size_t PoolIndex::position_of(std::size_t bid_index) const noexcept {
    return pos_of_[bid_index];
}

std::size_t PoolIndex::bid_at(std::size_t position) const noexcept {
    return order_[position];
}

Amount PoolIndex::stat_without(std::size_t p, std::size_t j) const noexcept {
    if (j < 1) return 0;
    std::size_t idx = j - 1;
    if (idx >= p) ++idx;
    return idx < amounts_.size() ? amounts_[idx] : 0;
}

std::size_t PoolIndex::insert_position(Amount amount, std::string_view id) const {
    // First position whose amount is <= amount, then first <, giving the tie
    // group; within the group tx_ids ascend, so a second binary search places
    // the id.
    const auto begin = amounts_.begin();
    const std::size_t eq_begin =
        std::lower_bound(begin, amounts_.end(), amount, std::greater<Amount>()) - begin;
    const std::size_t eq_end =
        std::upper_bound(begin, amounts_.end(), amount, std::greater<Amount>()) - begin;

    std::size_t lo = eq_begin;
    std::size_t hi = eq_end;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (pool_->bids[order_[mid]].tx_id < id)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

std::uint64_t PoolIndex::prefix_without(std::size_t count, std::size_t removed) const noexcept {
    if (count <= removed) return prefix_[count];
    return prefix_[count + 1] - amounts_[removed];
}

PoolIndex::EditEval PoolIndex::eval_edited(std::size_t removed, std::size_t q, Amount v) const noexcept {
    const std::size_t k = amounts_.size();
    const std::size_t m = (removed < k ? k - 1 : k) + 1;  // edited pool size

    // Sum of the edited pool's first i+1 sorted amounts.
    const auto sum_to = [&](std::size_t i) -> std::uint64_t {
        if (i == static_cast<std::size_t>(-1)) return 0;
        i = std::min(i, m - 1);
        const std::size_t from_base = i + 1 - (q <= i ? 1 : 0);
        return prefix_without(from_base, removed) + (q <= i ? v : 0);
    };

    EditEval ev;
    ev.position = q;
    ev.included = q < n_;
    ev.clearing = static_cast<Amount>(sum_to(n_ - 1) - sum_to(n_ - 2));
    ev.window = sum_to(2 * n_ - 1) - sum_to(n_ - 1);
    return ev;
}

PoolIndex::EditEval PoolIndex::eval_replace(std::size_t p, Amount new_amount) const {
    const std::string& id = pool_->bids[order_[p]].tx_id;
    std::size_t q = insert_position(new_amount, id);
    if (amounts_[p] > new_amount) --q;  // the removed element was counted ahead
    return eval_edited(p, q, new_amount);
}

PoolIndex::EditEval PoolIndex::eval_inject(Amount new_amount, std::string_view id) const {
    return eval_edited(amounts_.size(), insert_position(new_amount, id), new_amount);
}

}  // namespace bnp
