#include "locc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "locc/errors.hpp"
#include "locc/protocol.hpp"

namespace locc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, fmt::format("expected a non-negative integer, got '{}'", v));
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    return parse_angle(v);
  } catch (const Error&) {
    throw ConfigError(key, fmt::format("expected a number, got '{}'", v));
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kChsh: return "chsh";
    case Experiment::kSweep: return "sweep";
    case Experiment::kDistinguish: return "distinguish";
    case Experiment::kNoSignal: return "nosignal";
    case Experiment::kQecc: return "qecc";
    case Experiment::kFrames: return "frames";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (auto e : {Experiment::kChsh, Experiment::kSweep, Experiment::kDistinguish,
                 Experiment::kNoSignal, Experiment::kQecc, Experiment::kFrames}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "experiment", "mode",   "q_dim",   "qbar_dim", "lambda", "lambda_grid",
      "evolution_time", "trials", "seed", "out",      "format", "threads",
      "script",     "corpus", "q_dims",  "offset"};
  return keys;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::istringstream is{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", fmt::format("line {}: expected 'key = value'", line_no));
    }
    auto key = trim(body.substr(0, eq));
    auto value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("", fmt::format("line {}: empty key", line_no));
    if (out.contains(key)) throw ConfigError(key, fmt::format("line {}: repeated key", line_no));
    out.emplace(std::move(key), std::move(value));
  }
  return out;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

RunConfig make_config(const KeyValues& file_values, const KeyValues& flag_values) {
  KeyValues kv = file_values;
  for (const auto& [k, v] : flag_values) kv[k] = v;

  const auto& keys = known_keys();
  for (const auto& [k, v] : kv) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ConfigError(k, "unknown key");
    }
  }

  RunConfig cfg;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  const auto* exp = get("experiment");
  if (exp == nullptr) throw ConfigError("experiment", "missing required key");
  if (auto e = parse_experiment(*exp)) {
    cfg.experiment = *e;
  } else {
    throw ConfigError("experiment", fmt::format("unknown experiment '{}'", *exp));
  }

  const auto* seed = get("seed");
  if (seed == nullptr) throw ConfigError("seed", "missing required key");
  cfg.seed = parse_unsigned<std::uint64_t>("seed", *seed);

  if (const auto* v = get("mode")) {
    if (*v == "ER" || *v == "er") {
      cfg.mode = WorldMode::kER;
    } else if (*v == "EPR" || *v == "epr") {
      cfg.mode = WorldMode::kEPR;
    } else {
      throw ConfigError("mode", fmt::format("expected ER or EPR, got '{}'", *v));
    }
  }
  if (const auto* v = get("q_dim")) cfg.q_dim = parse_unsigned<std::size_t>("q_dim", *v);
  if (const auto* v = get("qbar_dim")) cfg.qbar_dim = parse_unsigned<std::size_t>("qbar_dim", *v);
  if (const auto* v = get("lambda")) cfg.lambda = parse_double("lambda", *v);
  if (const auto* v = get("lambda_grid")) {
    cfg.lambda_grid.clear();
    for (const auto& item : split_list(*v)) cfg.lambda_grid.push_back(parse_double("lambda_grid", item));
  }
  if (const auto* v = get("evolution_time")) cfg.evolution_time = parse_double("evolution_time", *v);
  if (const auto* v = get("trials")) cfg.trials = parse_unsigned<std::size_t>("trials", *v);
  if (const auto* v = get("out")) cfg.out = *v;
  if (const auto* v = get("format")) {
    if (*v == "columnar") {
      cfg.format = OutputFormat::kColumnar;
    } else if (*v == "structured") {
      cfg.format = OutputFormat::kStructured;
    } else {
      throw ConfigError("format", fmt::format("expected columnar or structured, got '{}'", *v));
    }
  }
  if (const auto* v = get("threads")) cfg.threads = parse_unsigned<unsigned>("threads", *v);
  if (const auto* v = get("script")) cfg.script = *v;
  if (const auto* v = get("corpus")) cfg.corpus = *v;
  if (const auto* v = get("q_dims")) {
    cfg.q_dims.clear();
    for (const auto& item : split_list(*v)) cfg.q_dims.push_back(parse_unsigned<std::size_t>("q_dims", item));
  }
  if (const auto* v = get("offset")) cfg.offset = parse_double("offset", *v);

  // Invariants.
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
    throw ConfigError("lambda", fmt::format("must be finite and >= 0, got {}", cfg.lambda));
  }
  if (cfg.lambda_grid.empty()) throw ConfigError("lambda_grid", "must not be empty");
  for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i) {
    const double l = cfg.lambda_grid[i];
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda_grid", "entries must be >= 0");
    if (i > 0 && !(l > cfg.lambda_grid[i - 1])) {
      throw ConfigError("lambda_grid", "entries must be strictly ascending");
    }
  }
  if (cfg.experiment == Experiment::kSweep && cfg.lambda_grid.front() != 0.0) {
    throw ConfigError("lambda_grid", "sweep grid must start at 0");
  }
  if (!(cfg.evolution_time > 0.0) || !std::isfinite(cfg.evolution_time)) {
    throw ConfigError("evolution_time", "must be finite and > 0");
  }
  if (cfg.trials < 1) throw ConfigError("trials", "must be >= 1");
  if (cfg.threads < 1) throw ConfigError("threads", "must be >= 1");
  if (cfg.q_dim < 2) throw ConfigError("q_dim", "must be >= 2");
  if (cfg.qbar_dim < 1) throw ConfigError("qbar_dim", "must be >= 1");
  if (cfg.q_dims.empty()) throw ConfigError("q_dims", "must not be empty");
  for (auto q : cfg.q_dims) {
    if (q < 2) throw ConfigError("q_dims", "entries must be >= 2");
  }
  if (!std::isfinite(cfg.offset)) throw ConfigError("offset", "must be finite");
  return cfg;
}

}  // namespace locc
