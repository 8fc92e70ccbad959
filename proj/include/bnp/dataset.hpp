#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bnp/bid.hpp"

namespace bnp {

inline constexpr int kDatasetSchemaVersion = 1;

struct TxRecord {
    std::string tx_id;
    std::string sender;
    Amount bid_amount = 0;     // max fee the sender committed to
    Amount baseline_paid = 0;  // effective price actually paid on chain
};

struct BlockRecord {
    std::uint64_t block_number = 0;
    std::uint64_t timestamp = 0;
    std::size_t capacity_n = 0;
    std::vector<TxRecord> txs;
    // Pending transactions observed alongside the block; absent when the
    // source provided none.
    std::optional<std::vector<TxRecord>> pending_pool;
};

struct RejectionRecord {
    std::uint64_t block_number = 0;
    std::string tx_id;  // empty when the whole block is rejected
    std::string reason;
};

struct NormalizeResult {
    std::optional<BlockRecord> record;
    std::vector<RejectionRecord> rejected;
};

// Turns one raw eth_getBlockByNumber result (full transaction objects) into a
// BlockRecord. Fee fields are normalized across type-2 and legacy
// transactions; transactions with no usable price are rejected per-tx, and a
// payload with no usable block header rejects the whole block.
[[nodiscard]] NormalizeResult normalize_block(const std::string& raw_json, std::size_t capacity_n);

struct FilterResult {
    std::vector<BlockRecord> kept;
    std::vector<RejectionRecord> dropped;
};

// Keeps blocks whose pending transaction count is at least threshold_ratio
// times capacity_n (boundary inclusive). Blocks with a missing or empty
// pending pool are dropped with a warning record: without pending data
// congestion cannot be established.
[[nodiscard]] FilterResult filter_congested(const std::vector<BlockRecord>& records,
                                            double threshold_ratio);

// Replay pool for one block: included plus pending transactions, deduplicated
// by tx_id, each bid's true value taken to be its bid amount.
[[nodiscard]] Mempool to_mempool(const BlockRecord& record);

struct ReplayComparison {
    std::uint64_t block_number = 0;
    Amount baseline_user_total = 0;   // what the included txs actually paid
    Amount bnp_user_total = 0;        // what the auction's winners pay
    Amount baseline_miner_revenue = 0;
    Amount bnp_miner_revenue = 0;
    Amount bnp_burned = 0;
};

[[nodiscard]] ReplayComparison replay_compare(const BlockRecord& record, std::size_t n_override = 0);

// JSONL persistence. store writes one block per line plus a leading header
// line carrying the schema version; load validates the version and reports
// truncation by byte offset.
void store_blocks(const std::filesystem::path& path, const std::vector<BlockRecord>& records);
[[nodiscard]] std::vector<BlockRecord> load_blocks(const std::filesystem::path& path);

void store_rejections(const std::filesystem::path& path, const std::vector<RejectionRecord>& records);

// "(100 * num / den)" rendered with two decimals, round half away from zero;
// "0.00" when den is zero. Exact integer arithmetic throughout.
[[nodiscard]] std::string percent_fixed2(Payoff num, std::uint64_t den);

}  // namespace bnp
