#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bnp/audit.hpp"

namespace bnp {

// Flat key=value configuration shared by every subcommand. Precedence, low
// to high: built-in defaults, config file, environment (BNP_RPC_ENDPOINT,
// BNP_RPC_TOKEN), command-line flags.
struct RunConfig {
    std::string endpoint;
    std::string auth_token;
    std::uint64_t from_block = 0;
    std::uint64_t to_block = 0;
    std::filesystem::path input;
    std::filesystem::path output_dir;
    std::filesystem::path cache_dir;
    double threshold_ratio = 2.0;
    std::size_t n = 0;  // 0 = use each block's capacity_n
    std::string future_model = "pessimistic";  // pessimistic | fixed_offset:<d> | next_round
    std::string grid = "pivots";               // pivots | step:<s>
    std::size_t collusion_c = 1;
    Payoff tolerance = 0;
    std::uint64_t max_evals = 200'000'000;
    std::uint64_t sample_count = 16;
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    // cmd_simulate only.
    std::uint64_t rounds = 10;
    std::size_t sim_pool_size = 24;
    double sim_arrival_rate = 8.0;
    Amount sim_max_amount = 100;
};

// Applies one key=value pair; throws ValidationError on unknown keys or
// unparsable values.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

// Lines of key=value; '#' starts a comment; blank lines ignored.
[[nodiscard]] RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

void apply_environment(RunConfig& config);

// Full key=value rendering of the effective configuration, keys sorted, one
// per line. Written next to every run's outputs.
[[nodiscard]] std::string render_config(const RunConfig& config);

[[nodiscard]] FutureCostModel parse_future_model(const std::string& text);
[[nodiscard]] std::pair<GridKind, Amount> parse_grid(const std::string& text);

// AuditConfig assembled from the run configuration.
[[nodiscard]] AuditConfig make_audit_config(const RunConfig& config);

}  // namespace bnp
