#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bnp/bid.hpp"

namespace bnp {

// Supplies the bids arriving fresh ahead of a given round. An empty function
// means no arrivals.
using ArrivalGenerator = std::function<std::vector<Bid>(std::uint64_t round)>;

// Prices the eventual inclusion of a transaction still pending when the
// evaluation horizon ends.
//
//   NextRoundRealized  actually plays the following round (deferred bids plus
//                      arrivals) and charges its realized clearing price.
//   FixedOffset        charges b_{2n} + offset off the current round's padded
//                      honest ordering.
//   Pessimistic        charges the current round's clearing price b_n, the
//                      worst deferral can cost.
struct FutureCostModel {
    enum class Kind {
        NextRoundRealized,
        FixedOffset,
        Pessimistic,
    };

    Kind kind = Kind::NextRoundRealized;
    Amount offset = 1;            // FixedOffset only
    ArrivalGenerator arrivals;    // NextRoundRealized only; may be empty

    [[nodiscard]] static FutureCostModel next_round_realized(ArrivalGenerator arrivals = {});
    // Throws ModelParameterError when offset is zero: a zero offset would
    // price deferral exactly at the window floor and erase the strict
    // orderings the analysis relies on.
    [[nodiscard]] static FutureCostModel fixed_offset(Amount offset);
    [[nodiscard]] static FutureCostModel pessimistic();
};

}  // namespace bnp
