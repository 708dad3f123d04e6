#pragma once

// CHSH experiments on the boundary pair.
//
// Measurement settings live in the Z-X plane: angle theta selects the
// observable cos(theta) Z + sin(theta) X. The CHSH statistic is
//   S = E(a,b) + E(a,b') + E(a',b) - E(a',b').

#include <array>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <vector>

#include "locc/worlds.hpp"

namespace locc {

inline constexpr double kTsirelsonBound = 2.0 * std::numbers::sqrt2;

struct CHSHConfig {
  double a = 0.0;
  double a_prime = std::numbers::pi / 2;
  double b = std::numbers::pi / 4;
  double b_prime = -std::numbers::pi / 4;
  std::size_t trials = 1;
  std::uint64_t seed = 0;

  double alice_angle(int setting) const { return setting == 0 ? a : a_prime; }
  double bob_angle(int setting) const { return setting == 0 ? b : b_prime; }
};

/// Cells are ordered (a,b), (a,b'), (a',b), (a',b').
struct CHSHResult {
  std::array<double, 4> correlations{};
  double s_value = 0.0;
  double s_abs = 0.0;
  double tsirelson_gap = 0.0;
  double standard_error = 0.0;
  /// Trials per cell; zero in exact mode.
  std::array<std::size_t, 4> cell_counts{};
};

std::size_t cell_index(int alice_setting, int bob_setting);
const char* cell_name(std::size_t cell);

/// cos(angle) Z + sin(angle) X on one qubit labelled `label`.
HermitianOperator observable_at(double angle, const std::string& label = "q");

double exact_correlation(const BoundaryPair& pair, double angle_a, double angle_b);
CHSHResult exact_chsh(const BoundaryPair& pair, const CHSHConfig& config);

struct TrialRecord {
  std::uint64_t trial;
  std::uint8_t alice_setting;
  std::uint8_t bob_setting;
  std::int8_t alice_outcome;  ///< +1 or -1
  std::int8_t bob_outcome;

  bool operator==(const TrialRecord&) const = default;
};

struct CHSHSample {
  CHSHResult result;
  std::vector<TrialRecord> transcript;
};

/// Per trial: both parties pick a setting uniformly and independently, then
/// measure the delivered pair. Trial i draws only from the counter stream
/// (config.seed, i), so the output does not depend on `threads`. Throws
/// EstimationError if any setting pair received no trials.
CHSHSample sample_chsh(const World& world, const CHSHConfig& config, unsigned threads = 1);

/// Correlations from raw trial records. Throws EstimationError on an empty cell.
CHSHResult estimate_chsh(const std::vector<TrialRecord>& transcript);

struct DecoherenceEstimate {
  double visibility;      ///< s_abs / 2 sqrt(2)
  bool exceeds_bound;     ///< visibility > 1, only possible through sampling noise
};

DecoherenceEstimate estimate_decoherence(const CHSHResult& result);

/// Columnar transcript: header line then one record per trial.
void write_transcript(std::ostream& os, const std::vector<TrialRecord>& transcript);

}  // namespace locc
