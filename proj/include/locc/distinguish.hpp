#pragma once

// What Alice and Bob can tell apart. Every comparison here is between exact
// classical transcript distributions obtained by enumerating all instrument
// branches of a protocol script on the delivered boundary pair; nothing is
// sampled.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "locc/bell.hpp"
#include "locc/protocol.hpp"
#include "locc/worlds.hpp"

namespace locc {

/// Transcript (concatenated round outcomes) -> probability.
struct OutcomeDistribution {
  std::map<std::string, double> probabilities;

  double total() const;
  double at(const std::string& transcript) const;
};

/// Per-round outcome labels.
using Transcript = std::vector<std::string>;

/// Branch enumeration of `script` on a two-qubit state with layout (q_A, q_B).
/// Zero-probability transcripts are kept. Throws LocalityError if a round
/// targets a factor other than the acting party's qubit and ContractError if
/// a reachable instrument is invalid.
std::map<Transcript, double> transcript_distribution(const DensityMatrix& pair,
                                                     const ProtocolScript& script);

OutcomeDistribution accessible_distribution(const BoundaryPair& pair, const ProtocolScript& script);
OutcomeDistribution accessible_distribution(const World& world, const ProtocolScript& script);

/// 1/2 sum |p - q| over the union of supports.
double total_variation(const OutcomeDistribution& p, const OutcomeDistribution& q);

struct EprParams {
  std::size_t q_dim = 2;
  std::size_t qbar_dim = 1;
  std::uint64_t seed = 1;
  double evolution_time = 1.0;
};

struct SweepRow {
  double lambda;
  double tvd_vs_er;
  double s_abs;  ///< exact CHSH at the default optimal angles
  double pair_purity;
};

/// One row per lambda; `lambda_grid` must be ascending and start at 0. Rows
/// are evaluated on up to `threads` threads and returned in grid order.
std::vector<SweepRow> theorem1_sweep(const std::vector<double>& lambda_grid,
                                     const ProtocolScript& script, const EprParams& params,
                                     unsigned threads = 1);

/// Largest pairwise TVD between EPR worlds that differ only in q_dim.
double corollary2_check(const std::vector<std::size_t>& q_dims, const ProtocolScript& script,
                        const EprParams& params = {}, double lambda = 0.0);

struct NoSignalingReport {
  double max_tvd = 0.0;
  /// Bob's rounds could see Alice's outcomes, so a nonzero TVD is classical
  /// communication rather than signalling.
  bool classical_channel_assisted = false;
  std::vector<OutcomeDistribution> bob_marginals;  ///< one per Alice variant
};

/// For each Alice variant, run [A: variant] followed by `bob_rounds` and
/// compare Bob's marginal transcript distributions.
NoSignalingReport no_signaling_check(const World& world,
                                     const std::vector<QuantumInstrument>& alice_variants,
                                     const std::vector<Round>& bob_rounds,
                                     bool classical_channel = false);

struct FrameDemoResult {
  double relative_angle;
  CHSHResult uncorrected;  ///< Bob keeps his nominal angles
  CHSHResult corrected;    ///< Bob subtracts the offset Alice sent him
};

/// Bob's z-axis is rotated by `relative_angle` about Y relative to Alice's.
FrameDemoResult frame_misalignment_demo(double relative_angle, const CHSHConfig& config = {});

void write_sweep_columnar(std::ostream& os, const std::vector<SweepRow>& rows);
nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows);
nlohmann::json to_json(const OutcomeDistribution& d);
nlohmann::json to_json(const CHSHResult& r);

}  // namespace locc
