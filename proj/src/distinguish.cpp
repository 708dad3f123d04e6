#include "locc/distinguish.hpp"

#include <cmath>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "locc/errors.hpp"
#include "locc/parallel.hpp"

namespace locc {

namespace {

std::string join(const Transcript& t, std::size_t from = 0) {
  std::string s;
  for (std::size_t i = from; i < t.size(); ++i) s += t[i];
  return s;
}

struct Leaf {
  ComplexMatrix rho;
  Transcript transcript;
};

// Kraus operators of one instrument lifted to the pair layout, with weights.
struct LiftedInstrument {
  std::vector<std::vector<ComplexMatrix>> ops;
  std::vector<std::vector<double>> weights;
};

LiftedInstrument lift(const QuantumInstrument& inst, const SubsystemLayout& layout,
                      const std::vector<std::string>& targets) {
  if (layout.dimension_of(targets) != inst.dimension()) {
    throw ArgumentError(fmt::format("instrument dimension {} does not match targets",
                                    inst.dimension()));
  }
  if (auto report = validate_instrument(inst); !report.passed()) {
    throw ContractError("invalid instrument in script: " + report.describe());
  }
  LiftedInstrument out;
  for (const auto& b : inst.branches()) {
    std::vector<ComplexMatrix> ops;
    std::vector<double> w;
    for (std::size_t k = 0; k < b.kraus.size(); ++k) {
      ops.push_back(embed_operator(b.kraus[k], layout, targets));
      w.push_back(b.weights.empty() ? 1.0 : b.weights[k]);
    }
    out.ops.push_back(std::move(ops));
    out.weights.push_back(std::move(w));
  }
  return out;
}

}  // namespace

double OutcomeDistribution::total() const {
  double s = 0.0;
  for (const auto& [k, p] : probabilities) s += p;
  return s;
}

double OutcomeDistribution::at(const std::string& transcript) const {
  auto it = probabilities.find(transcript);
  return it == probabilities.end() ? 0.0 : it->second;
}

std::map<Transcript, double> transcript_distribution(const DensityMatrix& pair,
                                                     const ProtocolScript& script) {
  if (script.rounds.empty()) throw ArgumentError("empty protocol");
  check_causal(script);
  const auto& layout = pair.layout();

  std::vector<Leaf> leaves{{pair.matrix(), {}}};
  for (std::size_t r = 0; r < script.rounds.size(); ++r) {
    const auto& round = script.rounds[r];
    const auto own = qubit_label(round.party);
    const auto targets = round.effective_targets();
    for (const auto& t : targets) {
      if (t != own) {
        throw LocalityError(fmt::format("round {}: party {} acts on '{}', not on its own qubit '{}'",
                                        r + 1, party_letter(round.party), t, own));
      }
    }

    std::map<const QuantumInstrument*, LiftedInstrument> lifted;
    std::vector<Leaf> next;
    for (const auto& leaf : leaves) {
      std::string key;
      for (std::size_t e = 0; e < r; ++e) {
        if (is_visible(script, e, r)) key += leaf.transcript[e];
      }
      const auto& inst = round.instrument_for(key);
      auto it = lifted.find(&inst);
      if (it == lifted.end()) it = lifted.emplace(&inst, lift(inst, layout, targets)).first;
      const auto& li = it->second;

      for (std::size_t b = 0; b < inst.branches().size(); ++b) {
        ComplexMatrix out = ComplexMatrix::Zero(leaf.rho.rows(), leaf.rho.cols());
        for (std::size_t k = 0; k < li.ops[b].size(); ++k) {
          out.noalias() += li.weights[b][k] * (li.ops[b][k] * leaf.rho * li.ops[b][k].adjoint());
        }
        Transcript t = leaf.transcript;
        t.push_back(inst.branches()[b].outcome);
        next.push_back({std::move(out), std::move(t)});
      }
    }
    leaves = std::move(next);
  }

  std::map<Transcript, double> dist;
  for (const auto& leaf : leaves) {
    dist[leaf.transcript] += std::max(0.0, leaf.rho.trace().real());
  }
  return dist;
}

OutcomeDistribution accessible_distribution(const BoundaryPair& pair, const ProtocolScript& script) {
  OutcomeDistribution out;
  for (const auto& [t, p] : transcript_distribution(pair.state, script)) {
    out.probabilities[join(t)] += p;
  }
  return out;
}

OutcomeDistribution accessible_distribution(const World& world, const ProtocolScript& script) {
  return accessible_distribution(deliver_pair(world), script);
}

double total_variation(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  std::set<std::string> support;
  for (const auto& [k, v] : p.probabilities) support.insert(k);
  for (const auto& [k, v] : q.probabilities) support.insert(k);
  double sum = 0.0;
  for (const auto& k : support) sum += std::abs(p.at(k) - q.at(k));
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

std::vector<SweepRow> theorem1_sweep(const std::vector<double>& lambda_grid,
                                     const ProtocolScript& script, const EprParams& params,
                                     unsigned threads) {
  if (lambda_grid.empty()) throw ArgumentError("lambda grid is empty");
  if (lambda_grid.front() != 0.0) throw ArgumentError("lambda grid must start at 0");
  for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1])) throw ArgumentError("lambda grid is not ascending");
  }
  const auto er = accessible_distribution(build_er_world(), script);

  std::vector<SweepRow> rows(lambda_grid.size());
  parallel_for(lambda_grid.size(), threads, [&](std::size_t i) {
    const double lambda = lambda_grid[i];
    const auto world = build_epr_world(params.q_dim, params.qbar_dim, lambda, params.seed,
                                       params.evolution_time);
    const auto pair = deliver_pair(world);
    rows[i] = SweepRow{lambda, total_variation(accessible_distribution(pair, script), er),
                       exact_chsh(pair, CHSHConfig{}).s_abs, purity(pair.state)};
  });
  return rows;
}

double corollary2_check(const std::vector<std::size_t>& q_dims, const ProtocolScript& script,
                        const EprParams& params, double lambda) {
  if (q_dims.empty()) throw ArgumentError("no q_dims given");
  std::vector<OutcomeDistribution> dists;
  dists.reserve(q_dims.size());
  for (auto q : q_dims) {
    const auto world = build_epr_world(q, params.qbar_dim, lambda, params.seed, params.evolution_time);
    dists.push_back(accessible_distribution(world, script));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (std::size_t j = i + 1; j < dists.size(); ++j) {
      worst = std::max(worst, total_variation(dists[i], dists[j]));
    }
  }
  return worst;
}

NoSignalingReport no_signaling_check(const World& world,
                                     const std::vector<QuantumInstrument>& alice_variants,
                                     const std::vector<Round>& bob_rounds, bool classical_channel) {
  if (alice_variants.empty()) throw ArgumentError("no Alice variants given");
  if (bob_rounds.empty()) throw ArgumentError("no Bob rounds given");
  for (const auto& r : bob_rounds) {
    if (r.party != Party::kBob) throw ArgumentError("bob_rounds contains a round for Alice");
  }

  const auto pair = deliver_pair(world);
  NoSignalingReport report;
  for (const auto& variant : alice_variants) {
    ProtocolScript script{"nosignal", {Round{Party::kAlice, variant}}, classical_channel};
    script.rounds.insert(script.rounds.end(), bob_rounds.begin(), bob_rounds.end());
    OutcomeDistribution marginal;
    for (const auto& [t, p] : transcript_distribution(pair.state, script)) {
      marginal.probabilities[join(t, 1)] += p;
    }
    report.bob_marginals.push_back(std::move(marginal));
  }
  for (std::size_t i = 0; i < report.bob_marginals.size(); ++i) {
    for (std::size_t j = i + 1; j < report.bob_marginals.size(); ++j) {
      report.max_tvd =
          std::max(report.max_tvd, total_variation(report.bob_marginals[i], report.bob_marginals[j]));
    }
  }
  if (classical_channel) {
    for (const auto& r : bob_rounds) {
      if (!r.variants.empty()) report.classical_channel_assisted = true;
    }
  }
  return report;
}

FrameDemoResult frame_misalignment_demo(double relative_angle, const CHSHConfig& config) {
  // Bob's observable at nominal angle theta is O(theta + offset) in Alice's
  // frame; equivalently his qubit is conjugated by R = exp(-i offset Y / 2).
  const ComplexMatrix r = std::cos(relative_angle / 2) * pauli::identity() -
                          Complex(0.0, std::sin(relative_angle / 2)) * pauli::y();
  const ComplexMatrix lift = tensor_product(pauli::identity(), r);
  const auto base = singlet();
  ComplexMatrix rotated = lift.adjoint() * base.matrix() * lift;
  rotated = 0.5 * (rotated + rotated.adjoint()).eval();
  const BoundaryPair misaligned{DensityMatrix(std::move(rotated), base.layout()),
                                "ER, Bob frame rotated"};

  CHSHConfig corrected = config;
  corrected.b -= relative_angle;
  corrected.b_prime -= relative_angle;
  return {relative_angle, exact_chsh(misaligned, config), exact_chsh(misaligned, corrected)};
}

void write_sweep_columnar(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "lambda\ttvd\ts_abs\tpurity\n";
  for (const auto& r : rows) {
    os << fmt::format("{:.17g}\t{:.17g}\t{:.17g}\t{:.17g}\n", r.lambda, r.tvd_vs_er, r.s_abs,
                      r.pair_purity);
  }
}

nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"lambda", r.lambda}, {"tvd", r.tvd_vs_er}, {"s_abs", r.s_abs},
                   {"purity", r.pair_purity}});
  }
  return arr;
}

nlohmann::json to_json(const OutcomeDistribution& d) {
  auto obj = nlohmann::json::object();
  for (const auto& [k, p] : d.probabilities) obj[k] = p;
  return obj;
}

nlohmann::json to_json(const CHSHResult& r) {
  return {{"correlations", r.correlations},   {"s_value", r.s_value},
          {"s_abs", r.s_abs},                 {"tsirelson_gap", r.tsirelson_gap},
          {"standard_error", r.standard_error}, {"cell_counts", r.cell_counts}};
}

}  // namespace locc
