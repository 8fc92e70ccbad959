#pragma once

#include <filesystem>
#include <vector>

#include "bnp/audit.hpp"
#include "bnp/dataset.hpp"

namespace bnp {

// Renders the figure-ready CSVs and the human-readable summary into dir:
//   fig_user_fees.csv      block_number, baseline_user_total, bnp_user_total
//   fig_miner_revenue.csv  block_number, baseline_miner_revenue, bnp_miner_revenue
//   fig_uic_delta.csv      block_number, uic_best_delta, sampled_mean_delta
//   fig_mic_delta.csv      block_number, mic_best_delta
//   fig_scp_delta.csv      block_number, scp_best_delta, scp_clearing_delta
//   summary.txt            mean reductions, violation counts, mean deltas
// Either list may be empty; only the matching files are written. Output is
// deterministic: no timestamps, rows ordered by block number.
void write_report(const std::filesystem::path& dir, const std::vector<ReplayComparison>& replays,
                  const std::vector<BlockAudit>& audits, std::size_t collusion_c);

// Mean of the per-block percentages 100*num/den, carried in exact integer
// micro-percent before the final 2-decimal rounding. Empty input -> "0.00".
[[nodiscard]] std::string mean_percent_fixed2(const std::vector<std::pair<Payoff, std::uint64_t>>& ratios);

}  // namespace bnp
