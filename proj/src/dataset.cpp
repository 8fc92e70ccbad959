#include "bnp/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "bnp/auction.hpp"
#include "bnp/errors.hpp"

namespace bnp {

namespace {

using ordered_json = nlohmann::ordered_json;

// Accepts RPC hex ("0x..."), decimal strings, and plain JSON integers.
std::optional<Amount> parse_amount(const nlohmann::json& value) {
    try {
        if (value.is_number_unsigned()) return value.get<Amount>();
        if (value.is_number_integer()) {
            const auto v = value.get<std::int64_t>();
            if (v < 0) return std::nullopt;
            return static_cast<Amount>(v);
        }
        if (value.is_string()) {
            const std::string s = value.get<std::string>();
            if (s.empty()) return std::nullopt;
            std::size_t consumed = 0;
            Amount parsed = 0;
            if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) {
                if (s.size() == 2) return std::nullopt;
                parsed = std::stoull(s.substr(2), &consumed, 16);
                consumed += 2;
            } else {
                parsed = std::stoull(s, &consumed, 10);
            }
            if (consumed != s.size()) return std::nullopt;
            return parsed;
        }
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return std::nullopt;
}

struct TxParse {
    std::optional<TxRecord> record;
    std::string reject_reason;  // set when record is absent
    std::string tx_id;
};

// Fee normalization across transaction envelopes: legacy txs bid and pay
// their gasPrice; type-2 txs bid maxFeePerGas and pay
// min(maxFeePerGas, base_fee + maxPriorityFeePerGas).
TxParse parse_tx(const nlohmann::json& tx, const std::optional<Amount>& base_fee) {
    TxParse out;
    if (!tx.is_object()) {
        out.reject_reason = "transaction entry is not an object";
        return out;
    }
    if (tx.contains("hash") && tx["hash"].is_string()) out.tx_id = tx["hash"].get<std::string>();
    if (out.tx_id.empty()) {
        out.reject_reason = "missing transaction hash";
        return out;
    }

    TxRecord record;
    record.tx_id = out.tx_id;
    if (tx.contains("from") && tx["from"].is_string()) record.sender = tx["from"].get<std::string>();

    std::optional<Amount> max_fee;
    if (tx.contains("maxFeePerGas")) max_fee = parse_amount(tx["maxFeePerGas"]);
    std::optional<Amount> gas_price;
    if (tx.contains("gasPrice")) gas_price = parse_amount(tx["gasPrice"]);

    if (max_fee) {
        record.bid_amount = *max_fee;
        std::optional<Amount> tip;
        if (tx.contains("maxPriorityFeePerGas")) tip = parse_amount(tx["maxPriorityFeePerGas"]);
        if (base_fee && tip) {
            record.baseline_paid = std::min(*max_fee, *base_fee + *tip);
        } else if (gas_price) {
            record.baseline_paid = gas_price.value_or(0);  // the node's effective price
        } else {
            out.reject_reason = "type-2 transaction without base fee context or gasPrice";
            return out;
        }
    } else if (gas_price) {
        record.bid_amount = gas_price.value_or(0);
        record.baseline_paid = record.bid_amount;
    } else {
        out.reject_reason = "no usable fee field (maxFeePerGas or gasPrice)";
        return out;
    }
    out.record = std::move(record);
    return out;
}

std::string amount_string(Amount value) { return std::to_string(value); }

ordered_json tx_to_json(const TxRecord& tx) {
    ordered_json j;
    j["tx_id"] = tx.tx_id;
    j["sender"] = tx.sender;
    j["bid_amount"] = amount_string(tx.bid_amount);
    j["baseline_paid"] = amount_string(tx.baseline_paid);
    return j;
}

TxRecord tx_from_json(const nlohmann::json& j, std::uint64_t line) {
    TxRecord tx;
    if (!j.is_object() || !j.contains("tx_id") || !j["tx_id"].is_string())
        throw ParseError(line, "transaction record missing tx_id");
    tx.tx_id = j["tx_id"].get<std::string>();
    if (j.contains("sender") && j["sender"].is_string()) tx.sender = j["sender"].get<std::string>();
    const std::optional<Amount> bid =
        j.contains("bid_amount") ? parse_amount(j["bid_amount"]) : std::nullopt;
    const std::optional<Amount> paid =
        j.contains("baseline_paid") ? parse_amount(j["baseline_paid"]) : std::nullopt;
    if (!bid || !paid) throw ParseError(line, "transaction record has unparseable amounts");
    tx.bid_amount = *bid;
    tx.baseline_paid = *paid;
    return tx;
}

}  // namespace

NormalizeResult normalize_block(const std::string& raw_json, std::size_t capacity_n) {
    NormalizeResult out;
    nlohmann::json payload = nlohmann::json::parse(raw_json, nullptr, false);
    if (payload.is_discarded()) {
        out.rejected.push_back({0, "", "unparseable JSON payload"});
        return out;
    }
    const nlohmann::json* block = &payload;
    if (payload.is_object() && payload.contains("result")) block = &payload["result"];
    if (block->is_null()) {
        out.rejected.push_back({0, "", "null result (block not available)"});
        return out;
    }
    if (!block->is_object()) {
        out.rejected.push_back({0, "", "block payload is not an object"});
        return out;
    }

    const std::optional<Amount> number =
        block->contains("number") ? parse_amount((*block)["number"]) : std::nullopt;
    if (!number) {
        out.rejected.push_back({0, "", "missing block number"});
        return out;
    }

    BlockRecord record;
    record.block_number = *number;
    if (block->contains("timestamp"))
        if (const std::optional<Amount> ts = parse_amount((*block)["timestamp"]))
            record.timestamp = *ts;

    const std::optional<Amount> base_fee =
        block->contains("baseFeePerGas") ? parse_amount((*block)["baseFeePerGas"]) : std::nullopt;

    std::size_t raw_tx_count = 0;
    if (block->contains("transactions") && (*block)["transactions"].is_array()) {
        const nlohmann::json& txs = (*block)["transactions"];
        raw_tx_count = txs.size();
        for (const nlohmann::json& tx : txs) {
            TxParse parsed = parse_tx(tx, base_fee);
            if (parsed.record)
                record.txs.push_back(std::move(*parsed.record));
            else
                out.rejected.push_back({record.block_number, parsed.tx_id, parsed.reject_reason});
        }
    }

    // The pending snapshot rides alongside the block in the fetch payload.
    const nlohmann::json* pending = nullptr;
    if (payload.is_object() && payload.contains("pending") && payload["pending"].is_array())
        pending = &payload["pending"];
    else if (block->contains("pending") && (*block)["pending"].is_array())
        pending = &(*block)["pending"];
    if (pending) {
        record.pending_pool.emplace();
        for (const nlohmann::json& tx : *pending) {
            TxParse parsed = parse_tx(tx, base_fee);
            if (parsed.record)
                record.pending_pool->push_back(std::move(*parsed.record));
            else
                out.rejected.push_back({record.block_number, parsed.tx_id, parsed.reject_reason});
        }
    }

    record.capacity_n = capacity_n ? capacity_n : raw_tx_count;
    out.record = std::move(record);
    return out;
}

FilterResult filter_congested(const std::vector<BlockRecord>& records, double threshold_ratio) {
    FilterResult out;
    for (const BlockRecord& record : records) {
        if (!record.pending_pool || record.pending_pool->empty()) {
            out.dropped.push_back(
                {record.block_number, "", "no pending pool data; congestion cannot be established"});
            continue;
        }
        const double demand = static_cast<double>(record.pending_pool->size());
        const double needed = threshold_ratio * static_cast<double>(record.capacity_n);
        if (demand >= needed) {
            out.kept.push_back(record);
        } else {
            std::ostringstream reason;
            reason << "pending pool " << record.pending_pool->size() << " below threshold "
                   << threshold_ratio << " x capacity " << record.capacity_n;
            out.dropped.push_back({record.block_number, "", reason.str()});
        }
    }
    return out;
}

Mempool to_mempool(const BlockRecord& record) {
    Mempool pool;
    pool.round = record.block_number;
    std::unordered_set<std::string> seen;
    const auto add = [&](const TxRecord& tx) {
        if (!seen.insert(tx.tx_id).second) return;
        pool.bids.push_back({tx.tx_id, tx.sender, tx.bid_amount, tx.bid_amount, BidOrigin::Genuine});
    };
    for (const TxRecord& tx : record.txs) add(tx);
    if (record.pending_pool)
        for (const TxRecord& tx : *record.pending_pool) add(tx);
    return pool;
}

ReplayComparison replay_compare(const BlockRecord& record, std::size_t n_override) {
    ReplayComparison cmp;
    cmp.block_number = record.block_number;
    for (const TxRecord& tx : record.txs) {
        cmp.baseline_user_total += tx.baseline_paid;
        cmp.baseline_miner_revenue += tx.baseline_paid;
    }

    const Mempool pool = to_mempool(record);
    AuctionParams params;
    params.n = n_override ? n_override : record.capacity_n;
    const AuctionOutcome outcome = run_auction(pool, params);
    cmp.bnp_user_total = outcome.total_collected;
    cmp.bnp_miner_revenue = outcome.miner_revenue;
    cmp.bnp_burned = outcome.burned;
    return cmp;
}

void store_blocks(const std::filesystem::path& path, const std::vector<BlockRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");

    ordered_json header;
    header["schema_version"] = kDatasetSchemaVersion;
    header["kind"] = "bnp-blocks";
    out << header.dump() << '\n';

    for (const BlockRecord& record : records) {
        ordered_json j;
        j["block_number"] = record.block_number;
        j["timestamp"] = record.timestamp;
        j["capacity_n"] = record.capacity_n;
        j["txs"] = ordered_json::array();
        for (const TxRecord& tx : record.txs) j["txs"].push_back(tx_to_json(tx));
        if (record.pending_pool) {
            j["pending_pool"] = ordered_json::array();
            for (const TxRecord& tx : *record.pending_pool)
                j["pending_pool"].push_back(tx_to_json(tx));
        }
        out << j.dump() << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

std::vector<BlockRecord> load_blocks(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string() + " for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    std::vector<BlockRecord> records;
    std::uint64_t line_number = 0;
    std::size_t offset = 0;
    bool saw_header = false;

    while (offset < content.size()) {
        const std::size_t end = content.find('\n', offset);
        if (end == std::string::npos) throw TruncatedFileError(offset);
        const std::string line = content.substr(offset, end - offset);
        ++line_number;

        if (!line.empty()) {
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) throw ParseError(line_number, "invalid JSON");
            if (!saw_header) {
                int version = 0;
                if (j.is_object() && j.contains("schema_version") &&
                    j["schema_version"].is_number_integer())
                    version = j["schema_version"].get<int>();
                if (version != kDatasetSchemaVersion)
                    throw SchemaVersionError(version, kDatasetSchemaVersion);
                saw_header = true;
            } else {
                BlockRecord record;
                if (!j.is_object() || !j.contains("block_number"))
                    throw ParseError(line_number, "block record missing block_number");
                const std::optional<Amount> number = parse_amount(j["block_number"]);
                if (!number) throw ParseError(line_number, "unparseable block_number");
                record.block_number = *number;
                if (j.contains("timestamp"))
                    if (const std::optional<Amount> ts = parse_amount(j["timestamp"]))
                        record.timestamp = *ts;
                if (j.contains("capacity_n"))
                    if (const std::optional<Amount> cap = parse_amount(j["capacity_n"]))
                        record.capacity_n = static_cast<std::size_t>(*cap);
                if (j.contains("txs") && j["txs"].is_array())
                    for (const nlohmann::json& tx : j["txs"])
                        record.txs.push_back(tx_from_json(tx, line_number));
                if (j.contains("pending_pool") && j["pending_pool"].is_array()) {
                    record.pending_pool.emplace();
                    for (const nlohmann::json& tx : j["pending_pool"])
                        record.pending_pool->push_back(tx_from_json(tx, line_number));
                }
                records.push_back(std::move(record));
            }
        }
        offset = end + 1;
    }
    if (!saw_header) throw SchemaVersionError(0, kDatasetSchemaVersion);
    return records;
}

void store_rejections(const std::filesystem::path& path, const std::vector<RejectionRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");

    ordered_json header;
    header["schema_version"] = kDatasetSchemaVersion;
    header["kind"] = "bnp-rejections";
    out << header.dump() << '\n';

    for (const RejectionRecord& record : records) {
        ordered_json j;
        j["block_number"] = record.block_number;
        j["tx_id"] = record.tx_id;
        j["reason"] = record.reason;
        out << j.dump() << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

std::string percent_fixed2(Payoff num, std::uint64_t den) {
    if (den == 0) return "0.00";
    const bool negative = num < 0;
    const unsigned __int128 magnitude =
        negative ? static_cast<unsigned __int128>(-static_cast<__int128>(num))
                 : static_cast<unsigned __int128>(num);
    // 100 (percent) * 100 (two decimals) * |num| / den, round half away from zero.
    const unsigned __int128 scaled = magnitude * 10000;
    unsigned __int128 quotient = scaled / den;
    const unsigned __int128 remainder = scaled % den;
    if (2 * remainder >= den) ++quotient;

    const std::uint64_t whole = static_cast<std::uint64_t>(quotient / 100);
    const std::uint64_t frac = static_cast<std::uint64_t>(quotient % 100);
    std::string result = negative && quotient != 0 ? "-" : "";
    result += std::to_string(whole);
    result += '.';
    if (frac < 10) result += '0';
    result += std::to_string(frac);
    return result;
}

}  // namespace bnp
