#include "locc/bell.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "locc/errors.hpp"
#include "locc/instruments.hpp"
#include "locc/parallel.hpp"
#include "locc/rng.hpp"

namespace locc {

namespace {

// Joint outcome probabilities for one setting pair, ordered
// (+,+), (+,-), (-,+), (-,-), obtained by Alice measuring first and Bob
// measuring her post-measurement state.
std::array<double, 4> joint_table(const DensityMatrix& pair, double angle_a, double angle_b) {
  const auto labels = pair.layout().labels();
  const auto alice = apply_instrument(projective_measurement(angle_a), pair, {labels[0]});
  const auto bob_inst = projective_measurement(angle_b);
  std::array<double, 4> table{};
  for (std::size_t i = 0; i < 2; ++i) {
    if (!alice[i].post_state) continue;
    const auto bob = apply_instrument(bob_inst, *alice[i].post_state, {labels[1]});
    for (std::size_t j = 0; j < 2; ++j) table[2 * i + j] = alice[i].probability * bob[j].probability;
  }
  return table;
}

CHSHResult finish(const std::array<double, 4>& e, double standard_error) {
  CHSHResult r;
  r.correlations = e;
  r.s_value = e[0] + e[1] + e[2] - e[3];
  r.s_abs = std::abs(r.s_value);
  r.tsirelson_gap = kTsirelsonBound - r.s_abs;
  r.standard_error = standard_error;
  return r;
}

}  // namespace

std::size_t cell_index(int alice_setting, int bob_setting) {
  return static_cast<std::size_t>(2 * alice_setting + bob_setting);
}

const char* cell_name(std::size_t cell) {
  static constexpr const char* kNames[] = {"E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"};
  return kNames[cell];
}

HermitianOperator observable_at(double angle, const std::string& label) {
  ComplexMatrix m = std::cos(angle) * pauli::z() + std::sin(angle) * pauli::x();
  return HermitianOperator(std::move(m), SubsystemLayout::qubits({label}));
}

double exact_correlation(const BoundaryPair& pair, double angle_a, double angle_b) {
  const auto labels = pair.state.layout().labels();
  if (labels.size() != 2) throw ArgumentError("boundary pair must have two factors");
  const auto op = tensor_product(observable_at(angle_a, labels[0]), observable_at(angle_b, labels[1]));
  return expectation(pair.state, op);
}

CHSHResult exact_chsh(const BoundaryPair& pair, const CHSHConfig& config) {
  std::array<double, 4> e{};
  for (int sa = 0; sa < 2; ++sa) {
    for (int sb = 0; sb < 2; ++sb) {
      e[cell_index(sa, sb)] =
          exact_correlation(pair, config.alice_angle(sa), config.bob_angle(sb));
    }
  }
  return finish(e, 0.0);
}

CHSHResult estimate_chsh(const std::vector<TrialRecord>& transcript) {
  std::array<std::size_t, 4> n{};
  std::array<long long, 4> sum{};
  for (const auto& t : transcript) {
    const auto c = cell_index(t.alice_setting, t.bob_setting);
    ++n[c];
    sum[c] += t.alice_outcome * t.bob_outcome;
  }
  std::array<double, 4> e{};
  double variance = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    if (n[c] == 0) {
      throw EstimationError(fmt::format("no trials for setting pair {}", cell_name(c)));
    }
    e[c] = static_cast<double>(sum[c]) / static_cast<double>(n[c]);
    // Mean of n independent +/-1 products.
    variance += (1.0 - e[c] * e[c]) / static_cast<double>(n[c]);
  }
  auto r = finish(e, std::sqrt(variance));
  r.cell_counts = n;
  return r;
}

CHSHSample sample_chsh(const World& world, const CHSHConfig& config, unsigned threads) {
  if (config.trials < 1) throw ArgumentError("trials must be >= 1");
  const auto pair = deliver_pair(world);

  std::array<std::array<double, 4>, 4> tables{};
  for (int sa = 0; sa < 2; ++sa) {
    for (int sb = 0; sb < 2; ++sb) {
      tables[cell_index(sa, sb)] =
          joint_table(pair.state, config.alice_angle(sa), config.bob_angle(sb));
    }
  }

  CHSHSample out;
  out.transcript.resize(config.trials);
  parallel_for(config.trials, threads, [&](std::size_t i) {
    CounterStream rng(config.seed, i);
    const int sa = rng.next_bit() ? 1 : 0;
    const int sb = rng.next_bit() ? 1 : 0;
    const auto& table = tables[cell_index(sa, sb)];
    const double u = rng.next_uniform();
    std::size_t k = 0;
    double acc = table[0];
    while (k < 3 && u >= acc) acc += table[++k];
    out.transcript[i] = TrialRecord{i, static_cast<std::uint8_t>(sa), static_cast<std::uint8_t>(sb),
                                    static_cast<std::int8_t>(k < 2 ? 1 : -1),
                                    static_cast<std::int8_t>(k % 2 == 0 ? 1 : -1)};
  });
  out.result = estimate_chsh(out.transcript);
  return out;
}

DecoherenceEstimate estimate_decoherence(const CHSHResult& result) {
  const double v = result.s_abs / kTsirelsonBound;
  return {v, v > 1.0};
}

void write_transcript(std::ostream& os, const std::vector<TrialRecord>& transcript) {
  os << "trial\talice_setting\tbob_setting\talice_outcome\tbob_outcome\n";
  for (const auto& t : transcript) {
    os << fmt::format("{}\t{}\t{}\t{:+d}\t{:+d}\n", t.trial, t.alice_setting, t.bob_setting,
                      t.alice_outcome, t.bob_outcome);
  }
}

}  // namespace locc
