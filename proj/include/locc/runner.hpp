#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "locc/config.hpp"

namespace locc {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCapacity = 3;
inline constexpr int kExitAssertion = 4;
inline constexpr int kExitEmptyCell = 5;

inline constexpr int kResultSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

struct RunReport {
  nlohmann::json config;
  /// Result document in the requested format. Depends only on the config
  /// (minus `out` and `threads`), never on timing or thread count.
  std::string payload;
  std::vector<Check> checks;
  double wall_seconds = 0.0;
  int exit_code = kExitSuccess;
  std::string error;
};

/// Config fields that determine the payload.
nlohmann::json config_echo(const RunConfig& config);

/// Executes the experiment and writes the payload to config.out when set.
/// Never throws for experiment failures; they are reported in exit_code and
/// error.
RunReport run(const RunConfig& config);

nlohmann::json report_to_json(const RunReport& report);

}  // namespace locc
