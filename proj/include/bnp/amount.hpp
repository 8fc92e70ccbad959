#pragma once

#include <cstdint>

namespace bnp {

// Amounts are exact integer wei. No floating point touches mechanism math.
using Amount = std::uint64_t;

// Signed payoffs and deviation deltas. Domain bound: amounts stay near 1e12
// and pools near 1e6 entries, so every sum of interest fits in 63 bits.
using Payoff = std::int64_t;

[[nodiscard]] constexpr Payoff as_payoff(Amount a) noexcept {
    return static_cast<Payoff>(a);
}

}  // namespace bnp
