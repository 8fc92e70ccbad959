#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bnp/dataset.hpp"

namespace bnp {

struct FetchOptions {
    std::string endpoint;     // http://host:port[/path]
    std::string auth_token;   // sent as a bearer token when non-empty
    std::size_t parallelism = 4;
    std::size_t max_attempts = 5;  // per block, exponential backoff between
    std::chrono::milliseconds initial_backoff{100};
    // Raw payload cache, one file per block; re-runs skip cached blocks.
    std::filesystem::path cache_dir;
};

struct FetchOutcome {
    // block number -> raw JSON-RPC result object, ascending by block.
    std::vector<std::pair<std::uint64_t, std::string>> payloads;
    // Blocks that failed transport after all retries (reason "network: ...").
    std::vector<RejectionRecord> missing;
    // Blocks the endpoint answered but with an unusable result.
    std::vector<RejectionRecord> rejected;
};

// Fetches [from_block, to_block] via the standard block-by-number JSON-RPC
// call with full transaction objects. Partial failure is reported, never
// hidden: every requested block lands in exactly one of the three lists.
[[nodiscard]] FetchOutcome fetch_blocks(const FetchOptions& options, std::uint64_t from_block,
                                        std::uint64_t to_block);

}  // namespace bnp
