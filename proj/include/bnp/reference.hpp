#pragma once

#include "bnp/audit.hpp"
#include "bnp/auction.hpp"
#include "bnp/dataset.hpp"
#include "bnp/strategy.hpp"

// Serial reference implementations kept deliberately naive and separate from
// the production code paths. Tests and fixture goldens are produced here;
// production results must match these exactly.
namespace bnp::reference {

// One auction round, written as the mechanism is stated: stable-sort the
// bids, pad the amount list with zeros to 2n, read the clearing price and the
// miner window straight off that list.
[[nodiscard]] AuctionOutcome run_auction(const Mempool& pool, const AuctionParams& params);

// Scenario scoring that materializes every pool and replays full auctions;
// shares no code with the production evaluator.
[[nodiscard]] ScenarioResult evaluate_scenario(const Mempool& pool, const DeviationScenario& scenario,
                                               const AuctionParams& params, const FutureCostModel& model);

// Full-grid audits with no candidate pruning and no incremental evaluation.
[[nodiscard]] AuditFinding audit_uic(const Mempool& pool, const AuctionParams& params,
                                     const AuditConfig& config);
[[nodiscard]] AuditFinding audit_mic(const Mempool& pool, const AuctionParams& params,
                                     const AuditConfig& config);
[[nodiscard]] AuditFinding audit_scp(const Mempool& pool, const AuctionParams& params, std::size_t c,
                                     const AuditConfig& config);
[[nodiscard]] BlockAudit audit_block(std::uint64_t block_number, const Mempool& pool,
                                     const AuctionParams& params, const AuditConfig& config);

[[nodiscard]] ReplayComparison replay_compare(const BlockRecord& record, std::size_t n_override = 0);

}  // namespace bnp::reference
