#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bnp/dataset.hpp"
#include "bnp/strategy.hpp"

namespace bnp {

enum class GridKind {
    // Every amount present in the pool plus its +-1 neighbors, plus zero.
    // Sufficient because every payoff is piecewise constant or piecewise
    // linear in a single deviating amount between order statistics, with
    // breaks only at existing amounts.
    AllPivotPoints,
    // Multiples of `step` from zero to just above the pool maximum.
    UniformStep,
};

struct AuditConfig {
    GridKind grid = GridKind::AllPivotPoints;
    Amount step = 1;  // UniformStep spacing
    std::size_t collusion_c = 1;
    FutureCostModel future_model = FutureCostModel::pessimistic();
    // A deviation is a violation when its delta strictly exceeds this.
    Payoff tolerance = 0;
    // Hard ceiling on scenario evaluations per audit call; exceeding it
    // throws InfeasibleSearchError instead of silently sampling.
    std::uint64_t max_evals = 200'000'000;
    // Per-block seeded random deviation sample, reported alongside the
    // exhaustive optimum.
    std::uint64_t sample_count = 16;
    std::uint64_t seed = 0;
};

struct AuditFinding {
    // Raw signed optimum over all non-null deviations in the search space.
    Payoff best_delta = 0;
    bool violating = false;  // best_delta > tolerance
    // A scenario achieving best_delta; absent when the space is empty.
    std::optional<DeviationScenario> witness;
    // Deviated minus honest clearing price under the witness scenario.
    Payoff witness_clearing_delta = 0;
};

// Candidate deviation amounts for a pool under the configured grid.
[[nodiscard]] std::vector<Amount> deviation_grid(const Mempool& pool, const AuditConfig& config);

// Canonical tie-break over scenarios achieving the same delta: by kind, then
// actor, then altered (tx_id, amount) pairs, then injected pairs. Every audit
// implementation reports the least witness under this order, so fast and
// naive searches agree byte for byte.
[[nodiscard]] bool witness_precedes(const DeviationScenario& a, const DeviationScenario& b);

// One randomly drawn re-pricing of an existing bid.
struct SampledDeviation {
    std::string tx_id;
    Amount amount = 0;
};

// Seeded per-block random deviations; both audit implementations score the
// same draws with their own engines.
[[nodiscard]] std::vector<SampledDeviation> sample_deviations(const Mempool& pool,
                                                              const AuditConfig& config,
                                                              std::uint64_t block_number);

// Best single-user deviation: every re-pricing of an owned bid plus every
// single value-less extra bid a user could inject.
[[nodiscard]] AuditFinding audit_uic(const Mempool& pool, const AuctionParams& params,
                                     const AuditConfig& config);

// Best single miner fake-bid injection.
[[nodiscard]] AuditFinding audit_mic(const Mempool& pool, const AuctionParams& params,
                                     const AuditConfig& config);

// Best miner-led coalition deviation with up to c raised users. The miner's
// solo option (a fake bid) stays in the space, so c = 0 degenerates to
// audit_mic and best_delta is monotone in c.
[[nodiscard]] AuditFinding audit_scp(const Mempool& pool, const AuctionParams& params, std::size_t c,
                                     const AuditConfig& config);

struct BlockAudit {
    std::uint64_t block_number = 0;
    AuditFinding uic;
    AuditFinding mic;
    std::vector<AuditFinding> scp;  // scp[i] audited with coalition bound i+1
    // Seeded random single-user deviations, kept as an exact sum/count pair.
    Payoff sampled_delta_sum = 0;
    std::uint64_t sampled_count = 0;
};

[[nodiscard]] BlockAudit audit_block(std::uint64_t block_number, const Mempool& pool,
                                     const AuctionParams& params, const AuditConfig& config);

struct AuditSummary {
    std::uint64_t blocks = 0;
    std::uint64_t uic_violations = 0;
    std::uint64_t mic_violations = 0;
    std::vector<std::uint64_t> scp_violations;  // per coalition bound, index c-1
    Payoff uic_delta_sum = 0;
    Payoff mic_delta_sum = 0;
    std::vector<Payoff> scp_delta_sum;
    Payoff scp_clearing_delta_sum = 0;  // witness clearing shifts, largest c
    Payoff sampled_delta_sum = 0;
    std::uint64_t sampled_count = 0;
};

struct DatasetAudit {
    std::vector<BlockAudit> blocks;
    AuditSummary summary;
};

// Audits every block (n_override = 0 takes each block's capacity_n). Blocks
// are independent and run in parallel; the summary reduction is commutative,
// so results are identical regardless of scheduling.
[[nodiscard]] DatasetAudit audit_dataset(const std::vector<BlockRecord>& records,
                                         const AuditConfig& config, std::size_t n_override = 0);

namespace detail {

// Full-grid search drivers shared by both implementations; the engine is the
// parameter. The fast paths must match these spaces exactly.
using ScenarioEvaluator = std::function<ScenarioResult(
    const Mempool&, const DeviationScenario&, const AuctionParams&, const FutureCostModel&)>;

[[nodiscard]] AuditFinding naive_audit_uic(const Mempool& pool, const AuctionParams& params,
                                           const AuditConfig& config,
                                           const ScenarioEvaluator& evaluate);
[[nodiscard]] AuditFinding naive_audit_mic(const Mempool& pool, const AuctionParams& params,
                                           const AuditConfig& config,
                                           const ScenarioEvaluator& evaluate);
[[nodiscard]] AuditFinding naive_audit_scp(const Mempool& pool, const AuctionParams& params,
                                           std::size_t c, const AuditConfig& config,
                                           const ScenarioEvaluator& evaluate);
[[nodiscard]] std::uint64_t naive_scp_eval_count(std::size_t eligible, std::size_t grid,
                                                 std::size_t c);

}  // namespace detail

}  // namespace bnp
