#include "bnp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "bnp/errors.hpp"

namespace bnp {

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        const std::uint64_t parsed = std::stoull(value, &consumed, 10);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + " needs an unsigned integer, got '" + value +
                              "'");
    }
}

std::int64_t parse_i64(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        const std::int64_t parsed = std::stoll(value, &consumed, 10);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + " needs an integer, got '" + value + "'");
    }
}

double parse_f64(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        const double parsed = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ValidationError("config key " + key + " needs a number, got '" + value + "'");
    }
}

std::string trim(const std::string& text) {
    const std::size_t first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const std::size_t last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

std::string render_double(double value) {
    std::ostringstream out;
    out << value;
    return out.str();
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "endpoint")
        config.endpoint = value;
    else if (key == "auth_token")
        config.auth_token = value;
    else if (key == "from_block")
        config.from_block = parse_u64(key, value);
    else if (key == "to_block")
        config.to_block = parse_u64(key, value);
    else if (key == "input")
        config.input = value;
    else if (key == "output_dir")
        config.output_dir = value;
    else if (key == "cache_dir")
        config.cache_dir = value;
    else if (key == "threshold_ratio")
        config.threshold_ratio = parse_f64(key, value);
    else if (key == "n")
        config.n = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "future_model")
        config.future_model = value;
    else if (key == "grid")
        config.grid = value;
    else if (key == "collusion_c")
        config.collusion_c = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "tolerance")
        config.tolerance = parse_i64(key, value);
    else if (key == "max_evals")
        config.max_evals = parse_u64(key, value);
    else if (key == "sample_count")
        config.sample_count = parse_u64(key, value);
    else if (key == "seed")
        config.seed = parse_u64(key, value);
    else if (key == "parallelism")
        config.parallelism = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "rounds")
        config.rounds = parse_u64(key, value);
    else if (key == "sim_pool_size")
        config.sim_pool_size = static_cast<std::size_t>(parse_u64(key, value));
    else if (key == "sim_arrival_rate")
        config.sim_arrival_rate = parse_f64(key, value);
    else if (key == "sim_max_amount")
        config.sim_max_amount = parse_u64(key, value);
    else
        throw ValidationError("unknown config key: " + key);
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());

    std::string line;
    std::uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) line.resize(comment);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config file " + path.string() + " line " +
                                  std::to_string(line_number) + ": expected key=value");
        apply_config_entry(base, trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
    }
    return base;
}

void apply_environment(RunConfig& config) {
    if (const char* endpoint = std::getenv("BNP_RPC_ENDPOINT")) config.endpoint = endpoint;
    if (const char* token = std::getenv("BNP_RPC_TOKEN")) config.auth_token = token;
}

std::string render_config(const RunConfig& config) {
    std::map<std::string, std::string> entries;
    entries["endpoint"] = config.endpoint;
    entries["auth_token"] = config.auth_token;
    entries["from_block"] = std::to_string(config.from_block);
    entries["to_block"] = std::to_string(config.to_block);
    entries["input"] = config.input.string();
    entries["output_dir"] = config.output_dir.string();
    entries["cache_dir"] = config.cache_dir.string();
    entries["threshold_ratio"] = render_double(config.threshold_ratio);
    entries["n"] = std::to_string(config.n);
    entries["future_model"] = config.future_model;
    entries["grid"] = config.grid;
    entries["collusion_c"] = std::to_string(config.collusion_c);
    entries["tolerance"] = std::to_string(config.tolerance);
    entries["max_evals"] = std::to_string(config.max_evals);
    entries["sample_count"] = std::to_string(config.sample_count);
    entries["seed"] = std::to_string(config.seed);
    entries["parallelism"] = std::to_string(config.parallelism);
    entries["rounds"] = std::to_string(config.rounds);
    entries["sim_pool_size"] = std::to_string(config.sim_pool_size);
    entries["sim_arrival_rate"] = render_double(config.sim_arrival_rate);
    entries["sim_max_amount"] = std::to_string(config.sim_max_amount);

    std::string out;
    for (const auto& [key, value] : entries) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

FutureCostModel parse_future_model(const std::string& text) {
    if (text == "pessimistic") return FutureCostModel::pessimistic();
    if (text == "next_round") return FutureCostModel::next_round_realized();
    const std::string prefix = "fixed_offset:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string offset = text.substr(prefix.size());
        return FutureCostModel::fixed_offset(parse_u64("future_model offset", offset));
    }
    throw ValidationError("unknown future model '" + text +
                          "' (pessimistic | fixed_offset:<d> | next_round)");
}

std::pair<GridKind, Amount> parse_grid(const std::string& text) {
    if (text == "pivots") return {GridKind::AllPivotPoints, 1};
    const std::string prefix = "step:";
    if (text.rfind(prefix, 0) == 0) {
        const Amount step = parse_u64("grid step", text.substr(prefix.size()));
        if (step == 0) throw ValidationError("grid step must be at least 1");
        return {GridKind::UniformStep, step};
    }
    throw ValidationError("unknown grid '" + text + "' (pivots | step:<s>)");
}

AuditConfig make_audit_config(const RunConfig& config) {
    AuditConfig audit;
    const auto [grid, step] = parse_grid(config.grid);
    audit.grid = grid;
    audit.step = step;
    audit.collusion_c = config.collusion_c;
    audit.future_model = parse_future_model(config.future_model);
    audit.tolerance = config.tolerance;
    audit.max_evals = config.max_evals;
    audit.sample_count = config.sample_count;
    audit.seed = config.seed;
    return audit;
}

}  // namespace bnp
