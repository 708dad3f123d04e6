#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "locc/errors.hpp"
#include "locc/runner.hpp"

using namespace locc;
namespace fs = std::filesystem;

namespace {

struct Process {
  int exit_code;
  std::string out;
};

// Runs the CLI with stderr discarded; returns its exit status and stdout.
Process run_cli(const std::string& args) {
  const std::string cmd = std::string(LOCC_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "locc_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string config_error_key(const KeyValues& file, const KeyValues& flags) {
  try {
    make_config(file, flags);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("config files parse as flat key = value text", "[cli]") {
  const auto kv = parse_key_values("# world\nmode = ER\n\ntrials=1000  # inline\nseed = 1\n");
  CHECK(kv == KeyValues{{"mode", "ER"}, {"trials", "1000"}, {"seed", "1"}});
  CHECK_THROWS_AS(parse_key_values("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_key_values("just words\n"), ConfigError);
}

TEST_CASE("make_config examples", "[cli]") {
  const auto cfg = make_config({{"experiment", "chsh"}, {"mode", "ER"}, {"trials", "1000"}, {"seed", "1"}}, {});
  CHECK(cfg.experiment == Experiment::kChsh);
  CHECK(cfg.mode == WorldMode::kER);
  CHECK(cfg.trials == 1000);
  CHECK(cfg.seed == 1);

  CHECK(config_error_key({{"experiment", "sweep"}, {"seed", "1"}, {"lambda", "-0.5"}}, {}) == "lambda");
  CHECK(make_config({{"experiment", "chsh"}, {"seed", "1"}}, {{"seed", "9"}}).seed == 9);

  CHECK(config_error_key({{"experiment", "chsh"}}, {}) == "seed");
  CHECK(config_error_key({{"experiment", "chsh"}, {"seed", "1"}, {"colour", "red"}}, {}) == "colour");
  CHECK(config_error_key({{"experiment", "chsh"}, {"seed", "1"}, {"trials", "many"}}, {}) == "trials");
  CHECK(config_error_key({{"experiment", "chsh"}, {"seed", "1"}, {"mode", "EPR"}, {"q_dim", "1"}}, {}) ==
        "q_dim");
  CHECK(config_error_key({{"experiment", "sweep"}, {"seed", "1"}, {"lambda_grid", "0.2,0.4"}}, {}) ==
        "lambda_grid");
  CHECK(config_error_key({{"experiment", "chsh"}, {"seed", "1"}, {"format", "xml"}}, {}) == "format");
}

TEST_CASE("run writes a sweep file with one row per lambda", "[cli]") {
  auto cfg = make_config({{"experiment", "sweep"}, {"seed", "1"}, {"lambda_grid", "0,0.3,0.6"}}, {});
  cfg.out = scratch("sweep.tsv").string();
  const auto report = run(cfg);
  CHECK(report.exit_code == kExitSuccess);
  const auto text = read_file(cfg.out);
  CHECK(text == report.payload);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "lambda\ttvd\ts_abs\tpurity");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 3);
  for (const auto& c : report.checks) CHECK(c.passed);
}

TEST_CASE("oversized worlds exit with the capacity code", "[cli]") {
  const auto cfg = make_config(
      {{"experiment", "chsh"}, {"seed", "1"}, {"mode", "EPR"}, {"q_dim", "8"}, {"qbar_dim", "8"}}, {});
  const auto report = run(cfg);
  CHECK(report.exit_code == kExitCapacity);
  CHECK_FALSE(report.error.empty());
  CHECK(report_to_json(report).contains("exit_code"));
}

TEST_CASE("structured output carries the schema and version", "[cli]") {
  const auto cfg = make_config({{"experiment", "frames"}, {"seed", "1"}, {"format", "structured"}}, {});
  const auto report = run(cfg);
  REQUIRE(report.exit_code == kExitSuccess);
  const auto doc = nlohmann::json::parse(report.payload);
  CHECK(doc["schema"] == "locc-result");
  CHECK(doc["schema_version"] == kResultSchemaVersion);
  CHECK(doc["experiment"] == "frames");
  CHECK(doc.contains("results"));
}

TEST_CASE("every experiment reruns to identical payloads", "[cli]") {
  for (const char* experiment : {"chsh", "sweep", "distinguish", "nosignal", "qecc", "frames"}) {
    INFO(experiment);
    KeyValues kv{{"experiment", experiment}, {"seed", "3"}, {"trials", "4000"}, {"mode", "EPR"},
                 {"lambda", "0.2"}, {"corpus", LOCC_DATA_DIR "/scripts"}};
    auto cfg = make_config(kv, {});
    const auto first = run(cfg);
    cfg.threads = 4;
    const auto second = run(cfg);
    CHECK(first.payload == second.payload);
    CHECK_FALSE(first.payload.empty());
  }
}

TEST_CASE("command line front end", "[cli]") {
  SECTION("help lists each experiment with an example") {
    const auto help = run_cli("--help");
    CHECK(help.exit_code == 0);
    for (const char* name : {"chsh", "sweep", "distinguish", "nosignal", "qecc", "frames"}) {
      CHECK(help.out.find(std::string("locc_cli ") + name + " --seed") != std::string::npos);
    }
  }
  SECTION("exit codes") {
    CHECK(run_cli("chsh --seed 1 --trials 2000").exit_code == 0);
    CHECK(run_cli("chsh --trials 2000").exit_code == kExitConfig);
    CHECK(run_cli("chsh --seed 1 --lambda -1").exit_code == kExitConfig);
    CHECK(run_cli("chsh --seed 1 --mode EPR --q-dim 8 --qbar-dim 8").exit_code == kExitCapacity);
    CHECK(run_cli("chsh --seed 1 --trials 2").exit_code == kExitEmptyCell);
  }
  SECTION("config file with flag override") {
    const auto path = scratch("run.cfg");
    std::ofstream(path) << "# sweep\nseed = 1\nlambda_grid = 0,0.5\n";
    const auto a = run_cli("sweep --config " + path.string());
    const auto b = run_cli("sweep --config " + path.string() + " --lambda-grid 0,0.5,1");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 3);
    CHECK(std::count(b.out.begin(), b.out.end(), '\n') == 4);
  }
  SECTION("payload goes to --out") {
    const auto path = scratch("frames.json");
    fs::remove(path);
    const auto r = run_cli("frames --seed 2 --format structured --out " + path.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(nlohmann::json::parse(read_file(path))["experiment"] == "frames");
  }
}
