#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnp/audit.hpp"
#include "bnp/config.hpp"
#include "bnp/csv.hpp"
#include "bnp/dataset.hpp"
#include "bnp/errors.hpp"
#include "bnp/report.hpp"
#include "bnp/rpc.hpp"
#include "bnp/strategy.hpp"
#include "bnp/synthetic.hpp"

namespace {

using namespace bnp;
namespace fs = std::filesystem;

// Every config key is also a flag; unset flags leave the merged value alone.
struct CliOverrides {
    std::string config_path;
    std::optional<std::string> endpoint;
    std::optional<std::string> auth_token;
    std::optional<std::uint64_t> from_block;
    std::optional<std::uint64_t> to_block;
    std::optional<std::string> input;
    std::optional<std::string> output_dir;
    std::optional<std::string> cache_dir;
    std::optional<double> threshold_ratio;
    std::optional<std::uint64_t> n;
    std::optional<std::string> future_model;
    std::optional<std::string> grid;
    std::optional<std::uint64_t> collusion_c;
    std::optional<std::int64_t> tolerance;
    std::optional<std::uint64_t> max_evals;
    std::optional<std::uint64_t> sample_count;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> parallelism;
    std::optional<std::uint64_t> rounds;
    std::optional<std::uint64_t> sim_pool_size;
    std::optional<double> sim_arrival_rate;
    std::optional<std::uint64_t> sim_max_amount;
};

RunConfig resolve_config(const CliOverrides& cli) {
    RunConfig cfg;
    if (!cli.config_path.empty()) cfg = load_config_file(cli.config_path, cfg);
    apply_environment(cfg);

    if (cli.endpoint) cfg.endpoint = *cli.endpoint;
    if (cli.auth_token) cfg.auth_token = *cli.auth_token;
    if (cli.from_block) cfg.from_block = *cli.from_block;
    if (cli.to_block) cfg.to_block = *cli.to_block;
    if (cli.input) cfg.input = *cli.input;
    if (cli.output_dir) cfg.output_dir = *cli.output_dir;
    if (cli.cache_dir) cfg.cache_dir = *cli.cache_dir;
    if (cli.threshold_ratio) cfg.threshold_ratio = *cli.threshold_ratio;
    if (cli.n) cfg.n = static_cast<std::size_t>(*cli.n);
    if (cli.future_model) cfg.future_model = *cli.future_model;
    if (cli.grid) cfg.grid = *cli.grid;
    if (cli.collusion_c) cfg.collusion_c = static_cast<std::size_t>(*cli.collusion_c);
    if (cli.tolerance) cfg.tolerance = *cli.tolerance;
    if (cli.max_evals) cfg.max_evals = *cli.max_evals;
    if (cli.sample_count) cfg.sample_count = *cli.sample_count;
    if (cli.seed) cfg.seed = *cli.seed;
    if (cli.parallelism) cfg.parallelism = static_cast<std::size_t>(*cli.parallelism);
    if (cli.rounds) cfg.rounds = *cli.rounds;
    if (cli.sim_pool_size) cfg.sim_pool_size = static_cast<std::size_t>(*cli.sim_pool_size);
    if (cli.sim_arrival_rate) cfg.sim_arrival_rate = *cli.sim_arrival_rate;
    if (cli.sim_max_amount) cfg.sim_max_amount = *cli.sim_max_amount;
    return cfg;
}

fs::path require_output_dir(const RunConfig& cfg) {
    if (cfg.output_dir.empty()) throw ValidationError("output_dir not set (use --output)");
    fs::create_directories(cfg.output_dir);
    return cfg.output_dir;
}

std::vector<BlockRecord> load_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ValidationError("input not set (use --input)");
    return load_blocks(cfg.input);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
}

// Reproducibility trail: the effective configuration, plus the config file
// verbatim when one was given.
void write_config_outputs(const RunConfig& cfg, const std::string& config_path,
                          const fs::path& dir) {
    write_file(dir / "config.resolved", render_config(cfg));
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        write_file(dir / "config.snapshot", buffer.str());
    }
}

struct FetchResult {
    std::vector<BlockRecord> records;
    std::vector<RejectionRecord> rejections;
    std::vector<RejectionRecord> missing;
};

FetchResult fetch_and_normalize(const RunConfig& cfg) {
    if (cfg.endpoint.empty())
        throw ValidationError("endpoint not set (flag --endpoint or BNP_RPC_ENDPOINT)");
    FetchOptions options;
    options.endpoint = cfg.endpoint;
    options.auth_token = cfg.auth_token;
    options.parallelism = std::max<std::size_t>(cfg.parallelism, 1);
    options.cache_dir = cfg.cache_dir;

    FetchResult result;
    FetchOutcome outcome = fetch_blocks(options, cfg.from_block, cfg.to_block);
    result.rejections = outcome.rejected;
    result.missing = outcome.missing;
    for (auto& [block, payload] : outcome.payloads) {
        NormalizeResult normalized = normalize_block(payload, cfg.n);
        for (RejectionRecord& reject : normalized.rejected) {
            if (reject.block_number == 0) reject.block_number = block;
            result.rejections.push_back(std::move(reject));
        }
        if (normalized.record) result.records.push_back(std::move(*normalized.record));
    }
    return result;
}

int cmd_fetch(const RunConfig& cfg, const std::string& config_path) {
    const fs::path dir = require_output_dir(cfg);
    FetchResult fetched = fetch_and_normalize(cfg);

    store_blocks(dir / "blocks.jsonl", fetched.records);
    std::vector<RejectionRecord> all = fetched.rejections;
    all.insert(all.end(), fetched.missing.begin(), fetched.missing.end());
    store_rejections(dir / "rejections.jsonl", all);
    write_config_outputs(cfg, config_path, dir);

    std::cout << "fetched " << fetched.records.size() << " blocks, " << fetched.rejections.size()
              << " rejected, " << fetched.missing.size() << " missing -> "
              << (dir / "blocks.jsonl").string() << '\n';
    if (!fetched.missing.empty()) {
        std::cerr << "error: block " << fetched.missing.front().block_number << ": "
                  << fetched.missing.front().reason << '\n';
        return 4;
    }
    return 0;
}

int cmd_filter(const RunConfig& cfg, const std::string& config_path) {
    const fs::path dir = require_output_dir(cfg);
    const std::vector<BlockRecord> records = load_input(cfg);
    FilterResult filtered = filter_congested(records, cfg.threshold_ratio);

    store_blocks(dir / "blocks.jsonl", filtered.kept);
    store_rejections(dir / "dropped.jsonl", filtered.dropped);
    write_config_outputs(cfg, config_path, dir);

    std::cout << "kept " << filtered.kept.size() << " of " << records.size() << " blocks -> "
              << (dir / "blocks.jsonl").string() << '\n';
    return 0;
}

std::vector<ReplayComparison> replay_all(const std::vector<BlockRecord>& records, std::size_t n) {
    std::vector<ReplayComparison> rows;
    rows.reserve(records.size());
    for (const BlockRecord& record : records) rows.push_back(replay_compare(record, n));
    return rows;
}

int cmd_replay(const RunConfig& cfg, const std::string& config_path) {
    const fs::path dir = require_output_dir(cfg);
    const std::vector<BlockRecord> records = load_input(cfg);
    const std::vector<ReplayComparison> rows = replay_all(records, cfg.n);

    std::ostringstream csv;
    write_replay_csv(csv, rows);
    write_file(dir / "replay.csv", csv.str());
    write_config_outputs(cfg, config_path, dir);

    std::cout << "replayed " << rows.size() << " blocks -> " << (dir / "replay.csv").string()
              << '\n';
    return 0;
}

int cmd_audit(const RunConfig& cfg, const std::string& config_path) {
    const fs::path dir = require_output_dir(cfg);
    const std::vector<BlockRecord> records = load_input(cfg);
    const DatasetAudit audit = audit_dataset(records, make_audit_config(cfg), cfg.n);

    std::ostringstream csv;
    write_audit_csv(csv, audit.blocks, std::max<std::size_t>(cfg.collusion_c, 1));
    write_file(dir / "audit.csv", csv.str());
    write_config_outputs(cfg, config_path, dir);

    std::uint64_t scp_violations = 0;
    if (!audit.summary.scp_violations.empty()) scp_violations = audit.summary.scp_violations.back();
    std::cout << "audited " << audit.summary.blocks << " blocks: " << audit.summary.uic_violations
              << " uic, " << audit.summary.mic_violations << " mic, " << scp_violations
              << " scp violations -> " << (dir / "audit.csv").string() << '\n';
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& config_path) {
    const fs::path dir = require_output_dir(cfg);
    if (cfg.n == 0) throw ValidationError("simulate needs n >= 1 (flag --n)");

    std::mt19937_64 rng(cfg.seed);
    synthetic::PoolSpec spec;
    spec.n = cfg.n;
    spec.min_size = cfg.sim_pool_size;
    spec.max_size = cfg.sim_pool_size;
    spec.min_amount = 0;
    spec.max_amount = cfg.sim_max_amount;
    const Mempool initial = synthetic::random_mempool(rng, spec);

    const ArrivalGenerator arrivals =
        synthetic::poisson_arrivals(cfg.seed + 1, cfg.sim_arrival_rate, 0, cfg.sim_max_amount);
    AuctionParams params;
    params.n = cfg.n;
    const SimulationResult result = simulate_rounds(initial, arrivals, params, cfg.rounds);

    std::ostringstream rounds_csv;
    rounds_csv << "round,clearing_price,winner_count,miner_revenue,burned,total_collected,"
                  "deferred_count\n";
    for (std::size_t i = 0; i < result.rounds.size(); ++i) {
        const AuctionOutcome& outcome = result.rounds[i];
        rounds_csv << i + 1 << ',' << outcome.clearing_price << ',' << outcome.winners.size()
                   << ',' << outcome.miner_revenue << ',' << outcome.burned << ','
                   << outcome.total_collected << ',' << outcome.deferred.bids.size() << '\n';
    }
    write_file(dir / "sim_rounds.csv", rounds_csv.str());

    std::ostringstream ledger_csv;
    ledger_csv << "actor,payoff\n";
    for (const auto& [actor, payoff] : result.ledger)
        ledger_csv << csv_field(actor) << ',' << payoff << '\n';
    write_file(dir / "sim_ledger.csv", ledger_csv.str());
    write_config_outputs(cfg, config_path, dir);

    std::cout << "simulated " << result.rounds.size() << " rounds -> "
              << (dir / "sim_rounds.csv").string() << '\n';
    return 0;
}

// The full figure stage over an already-normalized dataset: filter, replay,
// audit, figures, summary.
int report_stage(const RunConfig& cfg, const std::string& config_path, const fs::path& dir,
                 const std::vector<BlockRecord>& records) {
    FilterResult filtered = filter_congested(records, cfg.threshold_ratio);
    store_rejections(dir / "dropped.jsonl", filtered.dropped);
    if (filtered.kept.empty()) {
        write_config_outputs(cfg, config_path, dir);
        std::cerr << "error: no blocks after filtering (threshold "
                  << cfg.threshold_ratio << ")\n";
        return 2;
    }
    store_blocks(dir / "filtered.jsonl", filtered.kept);

    const std::vector<ReplayComparison> rows = replay_all(filtered.kept, cfg.n);
    std::ostringstream replay_csv;
    write_replay_csv(replay_csv, rows);
    write_file(dir / "replay.csv", replay_csv.str());

    const DatasetAudit audit = audit_dataset(filtered.kept, make_audit_config(cfg), cfg.n);
    const std::size_t c = std::max<std::size_t>(cfg.collusion_c, 1);
    std::ostringstream audit_csv;
    write_audit_csv(audit_csv, audit.blocks, c);
    write_file(dir / "audit.csv", audit_csv.str());

    write_report(dir, rows, audit.blocks, c);
    write_config_outputs(cfg, config_path, dir);

    std::cout << "reported " << filtered.kept.size() << " blocks -> " << dir.string() << '\n';
    return 0;
}

int cmd_report(const RunConfig& cfg, const std::string& config_path) {
    const fs::path dir = require_output_dir(cfg);
    return report_stage(cfg, config_path, dir, load_input(cfg));
}

int cmd_run(const RunConfig& cfg, const std::string& config_path) {
    const fs::path dir = require_output_dir(cfg);

    std::vector<BlockRecord> records;
    int fetch_status = 0;
    if (!cfg.input.empty()) {
        records = load_input(cfg);
    } else {
        FetchResult fetched = fetch_and_normalize(cfg);
        store_blocks(dir / "blocks.jsonl", fetched.records);
        std::vector<RejectionRecord> all = fetched.rejections;
        all.insert(all.end(), fetched.missing.begin(), fetched.missing.end());
        store_rejections(dir / "rejections.jsonl", all);
        if (!fetched.missing.empty()) {
            std::cerr << "error: block " << fetched.missing.front().block_number << ": "
                      << fetched.missing.front().reason << '\n';
            fetch_status = 4;
        }
        records = std::move(fetched.records);
    }

    const int report_status = report_stage(cfg, config_path, dir, records);
    return fetch_status != 0 ? fetch_status : report_status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"burning N-th price auction simulator and incentive auditor"};
    app.require_subcommand(1);

    CliOverrides cli;
    app.add_option("--config", cli.config_path, "key=value configuration file");
    app.add_option("--endpoint", cli.endpoint, "JSON-RPC endpoint, http://host:port[/path]");
    app.add_option("--token", cli.auth_token, "bearer token for the endpoint");
    app.add_option("--from", cli.from_block, "first block number to fetch");
    app.add_option("--to", cli.to_block, "last block number to fetch");
    app.add_option("--input", cli.input, "input dataset (JSONL)");
    app.add_option("--output", cli.output_dir, "output directory");
    app.add_option("--cache-dir", cli.cache_dir, "raw payload cache directory");
    app.add_option("--threshold-ratio", cli.threshold_ratio,
                   "congestion filter: pending >= ratio * capacity (default 2.0)");
    app.add_option("--n", cli.n, "winners per block; 0 = each block's capacity");
    app.add_option("--future-model", cli.future_model,
                   "pessimistic | fixed_offset:<d> | next_round");
    app.add_option("--grid", cli.grid, "deviation grid: pivots | step:<s>");
    app.add_option("--collusion-c", cli.collusion_c, "max coalition size audited");
    app.add_option("--tolerance", cli.tolerance, "violation threshold on payoff delta");
    app.add_option("--max-evals", cli.max_evals, "audit evaluation budget");
    app.add_option("--sample-count", cli.sample_count, "random deviation samples per block");
    app.add_option("--seed", cli.seed, "seed for sampling and simulation");
    app.add_option("--parallelism", cli.parallelism, "concurrent fetch requests");
    app.add_option("--rounds", cli.rounds, "simulated rounds");
    app.add_option("--sim-pool-size", cli.sim_pool_size, "initial simulated pool size");
    app.add_option("--sim-arrival-rate", cli.sim_arrival_rate, "mean arrivals per round");
    app.add_option("--sim-max-amount", cli.sim_max_amount, "max simulated bid amount");

    CLI::App* fetch = app.add_subcommand("fetch", "fetch blocks into a dataset");
    CLI::App* filter = app.add_subcommand("filter", "keep congested blocks");
    CLI::App* replay = app.add_subcommand("replay", "replay blocks under the auction");
    CLI::App* audit = app.add_subcommand("audit", "audit incentive properties");
    CLI::App* simulate = app.add_subcommand("simulate", "multi-round synthetic simulation");
    CLI::App* report = app.add_subcommand("report", "filter, replay, audit, render figures");
    CLI::App* run = app.add_subcommand("run", "fetch (or load) then report");
    for (CLI::App* sub : {fetch, filter, replay, audit, simulate, report, run})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const RunConfig cfg = resolve_config(cli);
        if (app.got_subcommand(fetch)) return cmd_fetch(cfg, cli.config_path);
        if (app.got_subcommand(filter)) return cmd_filter(cfg, cli.config_path);
        if (app.got_subcommand(replay)) return cmd_replay(cfg, cli.config_path);
        if (app.got_subcommand(audit)) return cmd_audit(cfg, cli.config_path);
        if (app.got_subcommand(simulate)) return cmd_simulate(cfg, cli.config_path);
        if (app.got_subcommand(report)) return cmd_report(cfg, cli.config_path);
        if (app.got_subcommand(run)) return cmd_run(cfg, cli.config_path);
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const InfeasibleSearchError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const NetworkError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
