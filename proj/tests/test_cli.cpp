#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int n = 0;
        path = fs::temp_directory_path() /
               ("bnp-cli-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

// Shells out to the built binary; the prefix slot carries env assignments or
// a `cd dir &&` stage.
RunResult run_cli(const std::string& args, const std::string& prefix = "") {
    static TempDir logs;
    static int call = 0;
    const fs::path out_file = logs.path / ("out-" + std::to_string(call) + ".txt");
    const fs::path err_file = logs.path / ("err-" + std::to_string(call) + ".txt");
    ++call;

    const std::string command = prefix + BNP_CLI_PATH + " " + args + " >" + out_file.string() +
                                " 2>" + err_file.string();
    const int status = std::system(command.c_str());

    RunResult result;
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

const std::string fixture = BNP_SOURCE_DIR "/data/fixture/blocks.jsonl"s;

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("bogus-subcommand").code == 1);
    CHECK(run_cli("replay --no-such-flag").code == 1);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("input and validation failures exit 2") {
    TempDir dir;
    const RunResult missing =
        run_cli("replay --input /nonexistent.jsonl --output " + dir.path.string());
    CHECK(missing.code == 2);
    CHECK(missing.err.rfind("error:", 0) == 0);

    const RunResult no_output = run_cli("replay --input " + fixture);
    CHECK(no_output.code == 2);
    CHECK(no_output.err.find("output_dir not set") != std::string::npos);

    const RunResult no_input = run_cli("audit --output " + dir.path.string());
    CHECK(no_input.code == 2);
    CHECK(no_input.err.find("input not set") != std::string::npos);
}

TEST_CASE("audit budget overruns exit 3") {
    TempDir dir;
    const RunResult result = run_cli("audit --input " + fixture + " --output " +
                                     dir.path.string() +
                                     " --future-model next_round --max-evals 1");
    CHECK(result.code == 3);
    CHECK(result.err.find("audit search infeasible") != std::string::npos);
}

TEST_CASE("fetch transport failures exit 4 but still write partial outputs") {
    TempDir dir;
    const RunResult result = run_cli("fetch --endpoint http://127.0.0.1:9/rpc --from 5 --to 5 " +
                                     ("--output " + dir.path.string()));
    CHECK(result.code == 4);
    CHECK(result.err.find("error: block 5") != std::string::npos);
    CHECK(fs::exists(dir.path / "blocks.jsonl"));
    CHECK(slurp(dir.path / "rejections.jsonl").find("network: ") != std::string::npos);
}

TEST_CASE("report refuses an empty post-filter dataset") {
    TempDir dir;
    const RunResult result = run_cli("report --input " + fixture + " --output " +
                                     dir.path.string() + " --threshold-ratio 999999");
    CHECK(result.code == 2);
    CHECK(result.err.find("no blocks after filtering") != std::string::npos);
    CHECK(fs::exists(dir.path / "dropped.jsonl"));
    CHECK(fs::exists(dir.path / "config.resolved"));
}

TEST_CASE("audit output trees are byte-identical across runs") {
    TempDir work_a;
    TempDir work_b;
    const std::string flags = "audit --input " + fixture + " --output out --seed 7 --sample-count 8";
    const RunResult a = run_cli(flags, "cd " + work_a.path.string() + " && ");
    const RunResult b = run_cli(flags, "cd " + work_b.path.string() + " && ");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);

    for (const char* name : {"audit.csv", "config.resolved"}) {
        const std::string file_a = slurp(work_a.path / "out" / name);
        const std::string file_b = slurp(work_b.path / "out" / name);
        REQUIRE_FALSE(file_a.empty());
        CHECK(file_a == file_b);
    }
}

TEST_CASE("filter then replay reproduces the report's replay stage") {
    TempDir filtered;
    TempDir replayed;
    TempDir reported;

    REQUIRE(run_cli("filter --input " + fixture + " --output " + filtered.path.string() +
                    " --threshold-ratio 2.0")
                .code == 0);
    REQUIRE(run_cli("replay --input " + (filtered.path / "blocks.jsonl").string() + " --output " +
                    replayed.path.string())
                .code == 0);
    REQUIRE(run_cli("report --input " + fixture + " --output " + reported.path.string() +
                    " --threshold-ratio 2.0")
                .code == 0);

    const std::string composed = slurp(replayed.path / "replay.csv");
    REQUIRE_FALSE(composed.empty());
    CHECK(composed == slurp(reported.path / "replay.csv"));

    for (const char* name : {"fig_user_fees.csv", "fig_miner_revenue.csv", "fig_uic_delta.csv",
                             "fig_mic_delta.csv", "fig_scp_delta.csv", "summary.txt"})
        CHECK(fs::exists(reported.path / name));
}

TEST_CASE("config file, environment, and flags apply in precedence order") {
    TempDir dir;
    const fs::path cfg = dir.path / "run.cfg";
    const std::string cfg_text =
        "# comment line\n"
        "endpoint=http://file.example\n"
        "threshold_ratio=3.5\n";
    {
        std::ofstream out(cfg, std::ios::binary);
        out << cfg_text;
    }
    const std::string base = "replay --config " + cfg.string() + " --input " + fixture;

    const fs::path out_a = dir.path / "a";
    REQUIRE(run_cli(base + " --output " + out_a.string()).code == 0);
    const std::string resolved_a = slurp(out_a / "config.resolved");
    CHECK(resolved_a.find("endpoint=http://file.example\n") != std::string::npos);
    CHECK(resolved_a.find("threshold_ratio=3.5\n") != std::string::npos);
    CHECK(slurp(out_a / "config.snapshot") == cfg_text);

    const fs::path out_b = dir.path / "b";
    REQUIRE(run_cli(base + " --output " + out_b.string(),
                    "BNP_RPC_ENDPOINT=http://env.example ")
                .code == 0);
    CHECK(slurp(out_b / "config.resolved").find("endpoint=http://env.example\n") !=
          std::string::npos);

    const fs::path out_c = dir.path / "c";
    REQUIRE(run_cli(base + " --output " + out_c.string() + " --endpoint http://flag.example",
                    "BNP_RPC_ENDPOINT=http://env.example ")
                .code == 0);
    CHECK(slurp(out_c / "config.resolved").find("endpoint=http://flag.example\n") !=
          std::string::npos);

    const fs::path bad_cfg = dir.path / "bad.cfg";
    {
        std::ofstream out(bad_cfg, std::ios::binary);
        out << "bogus_key=1\n";
    }
    const RunResult bad = run_cli("replay --config " + bad_cfg.string() + " --input " + fixture +
                                  " --output " + (dir.path / "d").string());
    CHECK(bad.code == 2);
    CHECK(bad.err.find("unknown config key") != std::string::npos);
}
