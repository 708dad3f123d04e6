#include "locc/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "locc/bell.hpp"
#include "locc/distinguish.hpp"
#include "locc/errors.hpp"

namespace locc {

namespace {

constexpr double kZeroTolerance = 1e-10;

World make_world(const RunConfig& c, double lambda) {
  if (c.mode == WorldMode::kER) return build_er_world();
  return build_epr_world(c.q_dim, c.qbar_dim, lambda, c.seed, c.evolution_time);
}

EprParams epr_params(const RunConfig& c) { return {c.q_dim, c.qbar_dim, c.seed, c.evolution_time}; }

ProtocolScript script_for(const RunConfig& c) {
  return c.script.empty() ? chsh_script() : load_script(c.script);
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

nlohmann::json document(const RunConfig& c, nlohmann::json results) {
  return {{"schema", "locc-result"},
          {"schema_version", kResultSchemaVersion},
          {"experiment", to_string(c.experiment)},
          {"config", config_echo(c)},
          {"results", std::move(results)}};
}

std::string emit(const RunConfig& c, const nlohmann::json& results, const std::string& columnar) {
  if (c.format == OutputFormat::kStructured) return document(c, results).dump(2) + "\n";
  return columnar;
}

std::string cell_columns(const CHSHResult& r) {
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}", g17(r.s_abs), g17(r.correlations[0]),
                     g17(r.correlations[1]), g17(r.correlations[2]), g17(r.correlations[3]),
                     g17(r.standard_error));
}

void run_chsh(const RunConfig& c, RunReport& rep) {
  const auto world = make_world(c, c.lambda);
  const auto pair = deliver_pair(world);
  CHSHConfig cfg;
  cfg.trials = c.trials;
  cfg.seed = c.seed;
  const auto exact = exact_chsh(pair, cfg);
  rep.checks.push_back({"tsirelson_ceiling", exact.s_abs <= kTsirelsonBound + 1e-9, g17(exact.s_abs)});
  if (c.mode == WorldMode::kER) {
    rep.checks.push_back({"tsirelson_attained", std::abs(exact.s_abs - kTsirelsonBound) <= 1e-10,
                          g17(exact.s_abs)});
  }
  const auto sample = sample_chsh(world, cfg, c.threads);
  const double dev = std::abs(sample.result.s_abs - exact.s_abs);
  rep.checks.push_back({"sample_within_5se", dev <= 5 * sample.result.standard_error,
                        fmt::format("|{} - {}| vs 5*{}", sample.result.s_abs, exact.s_abs,
                                    sample.result.standard_error)});

  std::ostringstream cols;
  write_transcript(cols, sample.transcript);
  nlohmann::json results{{"world", world.identifier()},
                         {"exact", to_json(exact)},
                         {"sampled", to_json(sample.result)},
                         {"visibility", estimate_decoherence(sample.result).visibility}};
  rep.payload = emit(c, results, cols.str());
}

void run_sweep(const RunConfig& c, RunReport& rep) {
  const auto rows = theorem1_sweep(c.lambda_grid, script_for(c), epr_params(c), c.threads);
  rep.checks.push_back({"zero_coupling_indistinguishable", rows.front().tvd_vs_er <= kZeroTolerance,
                        g17(rows.front().tvd_vs_er)});
  std::ostringstream cols;
  write_sweep_columnar(cols, rows);
  rep.payload = emit(c, {{"rows", sweep_to_json(rows)}}, cols.str());
}

void run_distinguish(const RunConfig& c, RunReport& rep) {
  std::vector<ProtocolScript> scripts;
  if (!c.corpus.empty()) {
    scripts = load_script_corpus(c.corpus);
  } else {
    scripts.push_back(script_for(c));
  }
  const auto epr = build_epr_world(c.q_dim, c.qbar_dim, c.lambda, c.seed, c.evolution_time);
  const auto er = build_er_world();
  std::string cols = "script\tlocc_depth\tlambda\ttvd\n";
  auto arr = nlohmann::json::array();
  double worst = 0.0;
  for (const auto& s : scripts) {
    const double tvd = total_variation(accessible_distribution(epr, s), accessible_distribution(er, s));
    worst = std::max(worst, tvd);
    const auto depth = classify_locc_depth(s);
    cols += fmt::format("{}\t{}\t{}\t{}\n", s.name, depth, g17(c.lambda), g17(tvd));
    arr.push_back({{"script", s.name}, {"locc_depth", depth}, {"tvd", tvd}});
  }
  if (c.lambda == 0.0) {
    rep.checks.push_back({"zero_coupling_indistinguishable", worst <= kZeroTolerance, g17(worst)});
  }
  rep.payload = emit(c, {{"lambda", c.lambda}, {"scripts", arr}, {"max_tvd", worst}}, cols);
}

void run_nosignal(const RunConfig& c, RunReport& rep) {
  using std::numbers::pi;
  const auto world = make_world(c, c.lambda);
  const std::vector<std::pair<std::string, QuantumInstrument>> variants{
      {"measure_z", projective_measurement(0.0)},
      {"measure_x", projective_measurement(pi / 2)},
      {"identity", identity_instrument()}};
  std::vector<QuantumInstrument> insts;
  for (const auto& [n, i] : variants) insts.push_back(i);

  std::vector<Round> bob;
  if (c.script.empty()) {
    bob.push_back(Round{Party::kBob, projective_measurement(0.0)});
  } else {
    bob = load_script(c.script).rounds;
  }
  const auto report = no_signaling_check(world, insts, bob, false);
  rep.checks.push_back({"no_signaling", report.max_tvd <= kZeroTolerance, g17(report.max_tvd)});

  std::string cols = "alice_variant\tbob_transcript\tprobability\n";
  auto arr = nlohmann::json::array();
  for (std::size_t i = 0; i < variants.size(); ++i) {
    for (const auto& [t, p] : report.bob_marginals[i].probabilities) {
      cols += fmt::format("{}\t{}\t{}\n", variants[i].first, t, g17(p));
    }
    arr.push_back({{"alice_variant", variants[i].first},
                   {"bob_marginal", to_json(report.bob_marginals[i])}});
  }
  rep.payload = emit(c, {{"world", world.identifier()}, {"variants", arr}, {"max_tvd", report.max_tvd}},
                     cols);
}

void run_qecc(const RunConfig& c, RunReport& rep) {
  const double worst = corollary2_check(c.q_dims, script_for(c), epr_params(c), c.lambda);
  if (c.lambda == 0.0) {
    rep.checks.push_back({"code_dimension_indistinguishable", worst <= kZeroTolerance, g17(worst)});
  }
  std::string dims;
  for (auto q : c.q_dims) dims += (dims.empty() ? "" : ",") + std::to_string(q);
  rep.payload = emit(c, {{"q_dims", c.q_dims}, {"lambda", c.lambda}, {"max_tvd", worst}},
                     fmt::format("q_dims\tlambda\tmax_tvd\n{}\t{}\t{}\n", dims, g17(c.lambda), g17(worst)));
}

void run_frames(const RunConfig& c, RunReport& rep) {
  const auto demo = frame_misalignment_demo(c.offset);
  rep.checks.push_back({"corrected_restores_tsirelson",
                        std::abs(demo.corrected.s_abs - kTsirelsonBound) <= 1e-10,
                        g17(demo.corrected.s_abs)});
  std::string cols = "case\ts_abs\te_ab\te_abp\te_apb\te_apbp\tstandard_error\n";
  cols += "uncorrected\t" + cell_columns(demo.uncorrected) + "\n";
  cols += "corrected\t" + cell_columns(demo.corrected) + "\n";
  rep.payload = emit(c,
                     {{"relative_angle", c.offset},
                      {"uncorrected", to_json(demo.uncorrected)},
                      {"corrected", to_json(demo.corrected)}},
                     cols);
}

}  // namespace

nlohmann::json config_echo(const RunConfig& c) {
  return {{"experiment", to_string(c.experiment)},
          {"mode", c.mode == WorldMode::kER ? "ER" : "EPR"},
          {"q_dim", c.q_dim},
          {"qbar_dim", c.qbar_dim},
          {"lambda", c.lambda},
          {"lambda_grid", c.lambda_grid},
          {"evolution_time", c.evolution_time},
          {"trials", c.trials},
          {"seed", c.seed},
          {"format", c.format == OutputFormat::kColumnar ? "columnar" : "structured"},
          {"script", c.script},
          {"corpus", c.corpus},
          {"q_dims", c.q_dims},
          {"offset", c.offset}};
}

RunReport run(const RunConfig& config) {
  RunReport rep;
  rep.config = config_echo(config);
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (config.experiment) {
      case Experiment::kChsh: run_chsh(config, rep); break;
      case Experiment::kSweep: run_sweep(config, rep); break;
      case Experiment::kDistinguish: run_distinguish(config, rep); break;
      case Experiment::kNoSignal: run_nosignal(config, rep); break;
      case Experiment::kQecc: run_qecc(config, rep); break;
      case Experiment::kFrames: run_frames(config, rep); break;
    }
    for (const auto& ch : rep.checks) {
      if (!ch.passed) {
        rep.exit_code = kExitAssertion;
        rep.error = fmt::format("check '{}' failed ({})", ch.name, ch.detail);
        break;
      }
    }
    if (!config.out.empty()) {
      std::ofstream out(config.out, std::ios::binary);
      if (!out) throw ConfigError("out", fmt::format("cannot write '{}'", config.out));
      out << rep.payload;
    }
  } catch (const CapacityError& e) {
    rep.exit_code = kExitCapacity;
    rep.error = e.what();
  } catch (const EstimationError& e) {
    rep.exit_code = kExitEmptyCell;
    rep.error = e.what();
  } catch (const ConfigError& e) {
    rep.exit_code = kExitConfig;
    rep.error = e.what();
  } catch (const ArgumentError& e) {
    rep.exit_code = kExitConfig;
    rep.error = e.what();
  } catch (const std::exception& e) {
    rep.exit_code = kExitInternal;
    rep.error = e.what();
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

nlohmann::json report_to_json(const RunReport& r) {
  auto checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"version", kVersion},
          {"schema_version", kResultSchemaVersion},
          {"config", r.config},
          {"checks", checks},
          {"wall_seconds", r.wall_seconds},
          {"exit_code", r.exit_code},
          {"error", r.error}};
}

}  // namespace locc
