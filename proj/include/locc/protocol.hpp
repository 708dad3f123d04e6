#pragma once

// Two-party LOCC protocol scripts.
//
// A script is an ordered list of rounds. In each round one party applies a
// quantum instrument to its own boundary qubit and the outcome label is
// appended to the transcript. A round may swap in a different instrument
// depending on the outcomes the acting party can see: its own earlier
// outcomes always, the other party's only while the classical channel is
// open.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "locc/instruments.hpp"

namespace locc {

enum class Party { kAlice, kBob };

inline constexpr std::string_view kAliceQubit = "q_A";
inline constexpr std::string_view kBobQubit = "q_B";

std::string qubit_label(Party p);
char party_letter(Party p);

struct Round {
  Party party = Party::kAlice;
  QuantumInstrument instrument;
  /// Instrument variants keyed by the acting party's visible history
  /// (concatenated outcome labels of the earlier rounds it can see).
  std::map<std::string, QuantumInstrument> variants = {};
  /// Factors the instrument acts on; empty means the party's own qubit.
  std::vector<std::string> targets = {};

  const QuantumInstrument& instrument_for(const std::string& visible_history) const;
  std::vector<std::string> effective_targets() const;
};

struct ProtocolScript {
  std::string name;
  std::vector<Round> rounds;
  bool classical_channel = true;
};

/// Whether round `later` can see the outcome of round `earlier`.
bool is_visible(const ProtocolScript& script, std::size_t earlier, std::size_t later);

/// Checks that every condition key is a history the acting party can
/// actually have observed at that point. Throws ArgumentError otherwise.
void check_causal(const ProtocolScript& script);

/// Number of one-way-local stages: maximal runs of consecutive rounds by the
/// same party. Throws ArgumentError on an empty script.
std::size_t classify_locc_depth(const ProtocolScript& script);

/// Alice and Bob each pick one of two angles uniformly and measure.
ProtocolScript chsh_script(double a, double a_prime, double b, double b_prime);
/// chsh_script at a = 0, a' = pi/2, b = pi/4, b' = -pi/4.
ProtocolScript chsh_script();

// Script text format, one directive per line, '#' starts a comment:
//
//   name <text>
//   channel on|off
//   round A|B <instrument> [on <label>[,<label>...]] [when <history>=<instrument> ...]
//
// <instrument> is one of measure(<angle>), settings(<angle>,<angle>),
// identity, depolarize(<p>), dephase(<p>), file(<path>). Paths are relative
// to the script file. Angles accept plain numbers and forms like pi, -pi/4,
// 3*pi/8.

double parse_angle(std::string_view text);
QuantumInstrument parse_instrument_expression(std::string_view text,
                                              const std::filesystem::path& base_dir = {});
ProtocolScript parse_script(std::string_view text, const std::filesystem::path& base_dir = {});
ProtocolScript load_script(const std::filesystem::path& path);
/// All *.script files in `dir`, sorted by file name.
std::vector<ProtocolScript> load_script_corpus(const std::filesystem::path& dir);

}  // namespace locc
