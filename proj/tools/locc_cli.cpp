// Command-line front end: locc_cli <experiment> [flags]

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "locc/config.hpp"
#include "locc/errors.hpp"
#include "locc/runner.hpp"

namespace {

struct Example {
  const char* name;
  const char* description;
  const char* example;
};

constexpr Example kExperiments[] = {
    {"chsh", "exact and sampled CHSH on the delivered pair",
     "locc_cli chsh --seed 7 --trials 100000"},
    {"sweep", "ER-vs-EPR distinguishability over a coupling grid",
     "locc_cli sweep --seed 1 --lambda-grid 0,0.3,0.6,0.9 --q-dim 2 --qbar-dim 1"},
    {"distinguish", "TVD between ER and EPR(lambda) for each protocol script",
     "locc_cli distinguish --seed 1 --lambda 0 --corpus data/scripts"},
    {"nosignal", "Bob's marginals under different Alice instruments, no classical channel",
     "locc_cli nosignal --seed 1 --mode EPR --lambda 0.8"},
    {"qecc", "largest TVD between channels of different dim(Q)",
     "locc_cli qecc --seed 1 --q-dims 2,3 --lambda 0"},
    {"frames", "CHSH with Bob's z-axis rotated, with and without correction",
     "locc_cli frames --seed 1 --offset pi/4"},
};

}  // namespace

int main(int argc, char** argv) {
  std::string footer = "\nExperiments:\n";
  for (const auto& e : kExperiments) {
    footer += std::string("  ") + e.name + ": " + e.description + "\n      " + e.example + "\n";
  }
  footer +=
      "\nExit codes: 0 success, 2 configuration, 3 capacity, 4 built-in check failed, "
      "5 empty CHSH cell.\n";

  CLI::App app{"LOCC two-party simulator: ER and EPR worlds, CHSH, distinguishability"};
  app.footer(footer);
  app.require_subcommand(1);

  std::string config_path, report_path;
  std::map<std::string, std::string> flags;

  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--report", report_path, "write the run report (JSON) here");
    auto opt = [&](const char* flag, const char* key, const char* help) {
      sub->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; },
                                            help);
    };
    opt("--seed", "seed", "master seed (u64, required)");
    opt("--trials", "trials", "CHSH trials");
    opt("--lambda", "lambda", "coupling strength");
    opt("--lambda-grid", "lambda_grid", "comma-separated ascending coupling grid");
    opt("--q-dim", "q_dim", "channel qubits in E");
    opt("--qbar-dim", "qbar_dim", "non-channel qubits in E");
    opt("--q-dims", "q_dims", "comma-separated channel sizes (qecc)");
    opt("--mode", "mode", "ER or EPR");
    opt("--evolution-time", "evolution_time", "environment evolution time");
    opt("--out", "out", "payload output path (default stdout)");
    opt("--format", "format", "columnar or structured");
    opt("--threads", "threads", "parallel width");
    opt("--script", "script", "protocol script file");
    opt("--corpus", "corpus", "directory of protocol scripts");
    opt("--offset", "offset", "Bob's frame rotation in radians (frames)");
  };
  for (const auto& e : kExperiments) {
    auto* sub = app.add_subcommand(e.name, std::string(e.description) + "\n  e.g. " + e.example);
    add_flags(sub);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  locc::RunConfig config;
  try {
    locc::KeyValues file;
    if (!config_path.empty()) file = locc::load_key_values(config_path);
    flags["experiment"] = experiment;
    config = locc::make_config(file, flags);
  } catch (const locc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return locc::kExitConfig;
  }

  const auto report = locc::run(config);
  if (config.out.empty() && report.exit_code != locc::kExitConfig &&
      report.exit_code != locc::kExitCapacity) {
    std::cout << report.payload;
  }
  for (const auto& c : report.checks) {
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
  }
  if (!report.error.empty()) std::cerr << "error: " << report.error << "\n";
  std::cerr << "exit " << report.exit_code << ", " << report.wall_seconds << " s\n";
  if (!report_path.empty()) {
    std::ofstream(report_path) << locc::report_to_json(report).dump(2) << "\n";
  }
  return report.exit_code;
}
