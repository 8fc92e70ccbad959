#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bnp/csv.hpp"
#include "bnp/reference.hpp"
#include "bnp/report.hpp"
#include "bnp/synthetic.hpp"

// Regenerates the bundled synthetic fixture and its golden outputs with the
// serial reference implementations. The goldens freeze what the production
// pipeline must reproduce byte for byte.
int main(int argc, char** argv) {
    using namespace bnp;
    namespace fs = std::filesystem;

    const fs::path root = argc > 1 ? argv[1] : "data";
    const fs::path fixture_dir = root / "fixture";
    const fs::path golden_dir = root / "golden";
    fs::create_directories(fixture_dir);
    fs::create_directories(golden_dir);

    constexpr std::uint64_t kSeed = 414243;
    constexpr std::uint64_t kFirstBlock = 1'000'000;
    constexpr std::size_t kBlocks = 20;
    constexpr std::size_t kCapacity = 6;
    constexpr std::size_t kPending = 16;

    const std::vector<BlockRecord> records =
        synthetic::synthetic_blocks(kSeed, kFirstBlock, kBlocks, kCapacity, kPending);
    store_blocks(fixture_dir / "blocks.jsonl", records);

    const FilterResult filtered = filter_congested(records, 2.0);
    if (filtered.kept.size() != records.size()) {
        std::cerr << "fixture is not fully congested; adjust generation parameters\n";
        return 1;
    }

    std::vector<ReplayComparison> replays;
    for (const BlockRecord& record : filtered.kept)
        replays.push_back(reference::replay_compare(record));

    const AuditConfig config;  // pessimistic model, pivot grid, c = 1
    std::vector<BlockAudit> audits;
    for (const BlockRecord& record : filtered.kept) {
        AuctionParams params;
        params.n = record.capacity_n;
        audits.push_back(
            reference::audit_block(record.block_number, to_mempool(record), params, config));
    }

    std::ostringstream replay_csv;
    write_replay_csv(replay_csv, replays);
    std::ofstream(golden_dir / "replay.csv", std::ios::binary) << replay_csv.str();

    std::ostringstream audit_csv;
    write_audit_csv(audit_csv, audits, config.collusion_c);
    std::ofstream(golden_dir / "audit.csv", std::ios::binary) << audit_csv.str();

    write_report(golden_dir, replays, audits, config.collusion_c);

    std::cout << "fixture: " << (fixture_dir / "blocks.jsonl").string() << '\n'
              << "goldens: " << golden_dir.string() << '\n';
    return 0;
}
