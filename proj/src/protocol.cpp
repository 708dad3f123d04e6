#include "locc/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "locc/errors.hpp"
#include "locc/instrument_io.hpp"

namespace locc {

std::string qubit_label(Party p) {
  return std::string(p == Party::kAlice ? kAliceQubit : kBobQubit);
}

char party_letter(Party p) { return p == Party::kAlice ? 'A' : 'B'; }

const QuantumInstrument& Round::instrument_for(const std::string& visible_history) const {
  if (auto it = variants.find(visible_history); it != variants.end()) return it->second;
  return instrument;
}

std::vector<std::string> Round::effective_targets() const {
  if (targets.empty()) return {qubit_label(party)};
  return targets;
}

bool is_visible(const ProtocolScript& script, std::size_t earlier, std::size_t later) {
  if (earlier >= later) return false;
  return script.classical_channel ||
         script.rounds[earlier].party == script.rounds[later].party;
}

void check_causal(const ProtocolScript& script) {
  for (std::size_t r = 0; r < script.rounds.size(); ++r) {
    const auto& round = script.rounds[r];
    if (round.variants.empty()) continue;
    std::set<std::string> histories{""};
    for (std::size_t e = 0; e < r; ++e) {
      if (!is_visible(script, e, r)) continue;
      std::set<std::string> labels;
      for (const auto& o : script.rounds[e].instrument.outcomes()) labels.insert(o);
      for (const auto& [key, inst] : script.rounds[e].variants) {
        for (const auto& o : inst.outcomes()) labels.insert(o);
      }
      std::set<std::string> next;
      for (const auto& h : histories) {
        for (const auto& l : labels) next.insert(h + l);
      }
      histories = std::move(next);
    }
    for (const auto& [key, inst] : round.variants) {
      if (!histories.contains(key)) {
        throw ArgumentError(fmt::format(
            "round {} ({}) conditions on history '{}', which that party cannot have observed", r + 1,
            party_letter(round.party), key));
      }
    }
  }
}

std::size_t classify_locc_depth(const ProtocolScript& script) {
  if (script.rounds.empty()) throw ArgumentError("empty protocol");
  std::size_t depth = 1;
  for (std::size_t r = 1; r < script.rounds.size(); ++r) {
    if (script.rounds[r].party != script.rounds[r - 1].party) ++depth;
  }
  return depth;
}

ProtocolScript chsh_script(double a, double a_prime, double b, double b_prime) {
  ProtocolScript s{"chsh", {}, true};
  s.rounds.push_back(Round{Party::kAlice, random_setting_measurement(a, a_prime)});
  s.rounds.push_back(Round{Party::kBob, random_setting_measurement(b, b_prime)});
  return s;
}

ProtocolScript chsh_script() {
  using std::numbers::pi;
  return chsh_script(0.0, pi / 2, pi / 4, -pi / 4);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

double parse_number(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ArgumentError(fmt::format("bad number '{}'", s));
  }
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

double parse_angle(std::string_view text) {
  const auto pos = text.find("pi");
  if (pos == std::string_view::npos) return parse_number(text);

  // [sign][coef*]pi[/den]
  double sign = 1.0;
  std::string_view head = text.substr(0, pos);
  if (!head.empty() && (head.front() == '-' || head.front() == '+')) {
    sign = head.front() == '-' ? -1.0 : 1.0;
    head.remove_prefix(1);
  }
  double coef = 1.0;
  if (!head.empty()) {
    if (head.back() != '*') throw ArgumentError(fmt::format("bad angle '{}'", text));
    coef = parse_number(head.substr(0, head.size() - 1));
  }
  std::string_view tail = text.substr(pos + 2);
  double den = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') throw ArgumentError(fmt::format("bad angle '{}'", text));
    den = parse_number(tail.substr(1));
  }
  return sign * coef * std::numbers::pi / den;
}

QuantumInstrument parse_instrument_expression(std::string_view text,
                                              const std::filesystem::path& base_dir) {
  const auto open = text.find('(');
  const std::string name(text.substr(0, open));
  std::vector<std::string> args;
  if (open != std::string_view::npos) {
    if (text.back() != ')') throw ArgumentError(fmt::format("bad instrument '{}'", text));
    args = split(text.substr(open + 1, text.size() - open - 2), ',');
  }
  auto want = [&](std::size_t n) {
    if (args.size() != n) {
      throw ArgumentError(fmt::format("'{}' takes {} argument(s), got {}", name, n, args.size()));
    }
  };

  if (name == "measure") {
    want(1);
    return projective_measurement(parse_angle(args[0]));
  }
  if (name == "settings") {
    want(2);
    return random_setting_measurement(parse_angle(args[0]), parse_angle(args[1]));
  }
  if (name == "identity") {
    if (open != std::string_view::npos) want(0);
    return identity_instrument(2);
  }
  if (name == "depolarize") {
    want(1);
    return depolarizing_channel(parse_number(args[0])).as_instrument("d");
  }
  if (name == "dephase") {
    want(1);
    return dephasing_channel(parse_number(args[0])).as_instrument("d");
  }
  if (name == "file") {
    want(1);
    return load_instrument(base_dir / args[0]);
  }
  throw ArgumentError(fmt::format("unknown instrument '{}'", name));
}

ProtocolScript parse_script(std::string_view text, const std::filesystem::path& base_dir) {
  ProtocolScript script;
  std::istringstream is{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    try {
      if (tok[0] == "name") {
        if (tok.size() < 2) throw ArgumentError("usage: name <text>");
        script.name = tok[1];
        for (std::size_t i = 2; i < tok.size(); ++i) script.name += " " + tok[i];
      } else if (tok[0] == "channel") {
        if (tok.size() != 2 || (tok[1] != "on" && tok[1] != "off")) {
          throw ArgumentError("usage: channel on|off");
        }
        script.classical_channel = tok[1] == "on";
      } else if (tok[0] == "round") {
        if (tok.size() < 3 || (tok[1] != "A" && tok[1] != "B")) {
          throw ArgumentError("usage: round A|B <instrument> ...");
        }
        Round round{tok[1] == "A" ? Party::kAlice : Party::kBob,
                    parse_instrument_expression(tok[2], base_dir)};
        for (std::size_t i = 3; i < tok.size(); ++i) {
          if (tok[i] == "on" && i + 1 < tok.size()) {
            round.targets = split(tok[++i], ',');
          } else if (tok[i] == "when" && i + 1 < tok.size()) {
            const auto& clause = tok[++i];
            const auto eq = clause.find('=');
            if (eq == std::string::npos) throw ArgumentError("usage: when <history>=<instrument>");
            round.variants.emplace(clause.substr(0, eq),
                                   parse_instrument_expression(clause.substr(eq + 1), base_dir));
          } else {
            throw ArgumentError(fmt::format("unexpected '{}'", tok[i]));
          }
        }
        script.rounds.push_back(std::move(round));
      } else {
        throw ArgumentError(fmt::format("unknown directive '{}'", tok[0]));
      }
    } catch (const Error& e) {
      throw ArgumentError(fmt::format("script line {}: {}", line_no, e.what()));
    }
  }
  if (script.rounds.empty()) throw ArgumentError("script has no rounds");
  check_causal(script);
  return script;
}

ProtocolScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(fmt::format("cannot open script '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  auto script = parse_script(ss.str(), path.parent_path());
  if (script.name.empty()) script.name = path.stem().string();
  return script;
}

std::vector<ProtocolScript> load_script_corpus(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".script") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<ProtocolScript> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_script(f));
  return out;
}

}  // namespace locc
