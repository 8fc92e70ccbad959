#include "bnp/rpc.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "bnp/errors.hpp"

namespace bnp {

namespace {

std::string hex_quantity(std::uint64_t value) {
    std::ostringstream out;
    out << "0x" << std::hex << value;
    return out.str();
}

struct ParsedEndpoint {
    std::string host_port;  // scheme://host[:port]
    std::string path;       // leading slash, "/" when absent
};

ParsedEndpoint split_endpoint(const std::string& endpoint) {
    ParsedEndpoint parsed;
    const std::size_t scheme = endpoint.find("://");
    const std::size_t path_start =
        endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        parsed.host_port = endpoint;
        parsed.path = "/";
    } else {
        parsed.host_port = endpoint.substr(0, path_start);
        parsed.path = endpoint.substr(path_start);
    }
    return parsed;
}

std::filesystem::path cache_file(const std::filesystem::path& dir, std::uint64_t block) {
    return dir / ("block-" + std::to_string(block) + ".json");
}

struct BlockResult {
    enum class Status { Ok, Missing, Rejected };
    Status status = Status::Missing;
    std::string payload;  // Ok: raw result object text
    std::string reason;   // Missing/Rejected
};

// One block over the wire: POST eth_getBlockByNumber with retries and
// exponential backoff. Transport failures and HTTP errors are retryable;
// a well-formed response is final whatever it says.
BlockResult fetch_one(const FetchOptions& options, const ParsedEndpoint& endpoint,
                      std::uint64_t block) {
    BlockResult result;
    std::string last_failure = "no attempts made";

    for (std::size_t attempt = 0; attempt < std::max<std::size_t>(options.max_attempts, 1);
         ++attempt) {
        if (attempt > 0) {
            const auto backoff = options.initial_backoff * (1ULL << (attempt - 1));
            std::this_thread::sleep_for(backoff);
        }

        httplib::Client client(endpoint.host_port);
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(10, 0);
        httplib::Headers headers;
        if (!options.auth_token.empty())
            headers.emplace("Authorization", "Bearer " + options.auth_token);

        nlohmann::json request;
        request["jsonrpc"] = "2.0";
        request["id"] = block;
        request["method"] = "eth_getBlockByNumber";
        request["params"] = {hex_quantity(block), true};

        const httplib::Result response =
            client.Post(endpoint.path, headers, request.dump(), "application/json");
        if (!response) {
            last_failure = "network: " + httplib::to_string(response.error());
            continue;
        }
        if (response->status < 200 || response->status >= 300) {
            last_failure = "network: HTTP " + std::to_string(response->status);
            continue;
        }

        nlohmann::json body = nlohmann::json::parse(response->body, nullptr, false);
        if (body.is_discarded()) {
            result.status = BlockResult::Status::Rejected;
            result.reason = "unparseable JSON-RPC response";
            return result;
        }
        if (body.contains("error") && !body["error"].is_null()) {
            result.status = BlockResult::Status::Rejected;
            result.reason = "rpc error: " + body["error"].dump();
            return result;
        }
        if (!body.contains("result") || body["result"].is_null()) {
            result.status = BlockResult::Status::Rejected;
            result.reason = "null result (block not available)";
            return result;
        }
        result.status = BlockResult::Status::Ok;
        result.payload = body["result"].dump();
        return result;
    }

    result.status = BlockResult::Status::Missing;
    result.reason = last_failure;
    return result;
}

}  // namespace

FetchOutcome fetch_blocks(const FetchOptions& options, std::uint64_t from_block,
                          std::uint64_t to_block) {
    if (to_block < from_block) throw ValidationError("to_block below from_block");
    if (options.endpoint.empty()) throw ValidationError("no RPC endpoint configured");

    const ParsedEndpoint endpoint = split_endpoint(options.endpoint);
    const bool use_cache = !options.cache_dir.empty();
    if (use_cache) std::filesystem::create_directories(options.cache_dir);

    const std::size_t count = static_cast<std::size_t>(to_block - from_block) + 1;
    std::vector<BlockResult> results(count);

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            const std::uint64_t block = from_block + i;

            if (use_cache) {
                std::ifstream cached(cache_file(options.cache_dir, block), std::ios::binary);
                if (cached) {
                    std::ostringstream buffer;
                    buffer << cached.rdbuf();
                    results[i].status = BlockResult::Status::Ok;
                    results[i].payload = buffer.str();
                    continue;
                }
            }

            results[i] = fetch_one(options, endpoint, block);
            if (use_cache && results[i].status == BlockResult::Status::Ok) {
                std::ofstream out(cache_file(options.cache_dir, block),
                                  std::ios::binary | std::ios::trunc);
                out << results[i].payload;
            }
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(options.parallelism, count));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    FetchOutcome outcome;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t block = from_block + i;
        switch (results[i].status) {
            case BlockResult::Status::Ok:
                outcome.payloads.emplace_back(block, std::move(results[i].payload));
                break;
            case BlockResult::Status::Missing:
                outcome.missing.push_back({block, "", results[i].reason});
                break;
            case BlockResult::Status::Rejected:
                outcome.rejected.push_back({block, "", results[i].reason});
                break;
        }
    }
    return outcome;
}

}  // namespace bnp
