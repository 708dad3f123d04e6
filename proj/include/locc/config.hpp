#pragma once

// Run configuration for the command-line front end.
//
// Config files are flat UTF-8 text, one `key = value` per line, `#` starts a
// comment. Command-line flags are turned into the same key/value form and
// override file values.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locc/worlds.hpp"

namespace locc {

enum class Experiment { kChsh, kSweep, kDistinguish, kNoSignal, kQecc, kFrames };
enum class OutputFormat { kColumnar, kStructured };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

struct RunConfig {
  Experiment experiment = Experiment::kChsh;
  WorldMode mode = WorldMode::kER;
  std::size_t q_dim = 2;
  std::size_t qbar_dim = 1;
  double lambda = 0.0;
  std::vector<double> lambda_grid{0.0, 0.3, 0.6, 0.9};
  double evolution_time = 1.0;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::string out;
  OutputFormat format = OutputFormat::kColumnar;
  unsigned threads = 1;
  std::string script;  ///< protocol script file; empty means the built-in CHSH script
  std::string corpus;  ///< directory of *.script files (distinguish)
  std::vector<std::size_t> q_dims{2, 3};
  double offset = 0.7853981633974483;  ///< frames: Bob's frame rotation
};

using KeyValues = std::map<std::string, std::string>;

/// Every key a config file or flag may set.
const std::vector<std::string>& known_keys();

KeyValues parse_key_values(std::string_view text);
KeyValues load_key_values(const std::filesystem::path& path);

/// Validated config from file values overlaid with flag values. Unknown keys,
/// malformed values and violated invariants raise ConfigError naming the key.
RunConfig make_config(const KeyValues& file_values, const KeyValues& flag_values);

}  // namespace locc
