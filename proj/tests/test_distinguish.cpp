#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "locc/distinguish.hpp"
#include "locc/errors.hpp"
#include "support.hpp"

using namespace locc;
using Catch::Matchers::WithinAbs;
using std::numbers::pi;

namespace {

ProtocolScript one_round(Party p, const QuantumInstrument& inst) {
  return ProtocolScript{"one", {Round{p, inst}}, true};
}

ProtocolScript two_rounds(const QuantumInstrument& a, const QuantumInstrument& b) {
  return ProtocolScript{"two", {Round{Party::kAlice, a}, Round{Party::kBob, b}}, true};
}

OutcomeDistribution dist(std::map<std::string, double> p) { return OutcomeDistribution{std::move(p)}; }

std::vector<ProtocolScript> corpus() { return load_script_corpus(LOCC_DATA_DIR "/scripts"); }

}  // namespace

TEST_CASE("accessible_distribution examples", "[distinguish]") {
  const auto er = build_er_world();
  const auto z = projective_measurement(0.0);

  const auto a_only = accessible_distribution(er, one_round(Party::kAlice, z));
  CHECK(a_only.probabilities.size() == 2);
  CHECK_THAT(a_only.at("0"), WithinAbs(0.5, 1e-15));
  CHECK_THAT(a_only.at("1"), WithinAbs(0.5, 1e-15));

  const auto zz = accessible_distribution(er, two_rounds(z, z));
  CHECK(zz.probabilities.size() == 4);  // zero-probability transcripts are kept
  CHECK_THAT(zz.at("00"), WithinAbs(0.0, 1e-15));
  CHECK_THAT(zz.at("01"), WithinAbs(0.5, 1e-15));
  CHECK_THAT(zz.at("10"), WithinAbs(0.5, 1e-15));
  CHECK_THAT(zz.at("11"), WithinAbs(0.0, 1e-15));
}

TEST_CASE("EPR(0.6) CHSH distribution matches a full-space oracle", "[distinguish]") {
  for (std::size_t qbar : {1u, 2u}) {
    const auto world = build_epr_world(2, qbar, 0.6, 1);
    const auto d = accessible_distribution(world, chsh_script());
    const auto oracle = test::oracle_chsh_distribution(test::oracle_environment_state(world),
                                                       {0.0, pi / 2}, {pi / 4, -pi / 4});
    REQUIRE(d.probabilities.size() == oracle.size());
    for (const auto& [t, p] : oracle) {
      INFO(t);
      CHECK_THAT(d.at(t), WithinAbs(p, 1e-10));
    }
    CHECK_THAT(d.total(), WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("rounds may only touch the acting party's qubit", "[distinguish]") {
  ProtocolScript bad{"bad", {Round{Party::kAlice, projective_measurement(0.0), {}, {"q_B"}}}, true};
  CHECK_THROWS_AS(accessible_distribution(build_er_world(), bad), LocalityError);
  const QuantumInstrument half({{"x", {std::sqrt(0.5) * ComplexMatrix::Identity(2, 2)}, {}}});
  CHECK_THROWS_AS(accessible_distribution(build_er_world(), one_round(Party::kBob, half)),
                  ContractError);
}

TEST_CASE("total_variation examples", "[distinguish]") {
  const auto p = dist({{"a", 0.3}, {"b", 0.7}});
  CHECK(total_variation(p, p) == 0.0);
  CHECK_THAT(total_variation(dist({{"a", 1.0}}), dist({{"b", 1.0}})), WithinAbs(1.0, 1e-15));
  CHECK_THAT(total_variation(dist({{"0", 0.75}, {"1", 0.25}}), dist({{"0", 0.5}, {"1", 0.5}})),
             WithinAbs(0.25, 1e-15));
}

TEST_CASE("coupling sweep examples", "[distinguish]") {
  const auto script = chsh_script();
  const auto zero = theorem1_sweep({0.0}, script, {});
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].tvd_vs_er <= 1e-10);
  CHECK_THAT(zero[0].s_abs, WithinAbs(kTsirelsonBound, 1e-10));
  CHECK_THAT(zero[0].pair_purity, WithinAbs(1.0, 1e-10));

  const auto rows = theorem1_sweep({0.0, 0.5, 1.0}, script, {});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].tvd_vs_er <= 1e-10);
  CHECK(rows[1].tvd_vs_er > rows[0].tvd_vs_er);
  CHECK(rows[2].tvd_vs_er > rows[1].tvd_vs_er);
  for (const auto& r : rows) {
    CHECK(r.tvd_vs_er >= 0.0);
    CHECK(r.tvd_vs_er <= 1.0);
    CHECK(std::isfinite(r.s_abs));
  }

  for (std::size_t q : {2u, 3u}) {
    EprParams params;
    params.q_dim = q;
    CHECK(theorem1_sweep({0.0}, script, params)[0].tvd_vs_er <= 1e-10);
  }

  CHECK_THROWS_AS(theorem1_sweep({0.1, 0.2}, script, {}), ArgumentError);
  CHECK_THROWS_AS(theorem1_sweep({0.0, 0.5, 0.2}, script, {}), ArgumentError);
}

TEST_CASE("sweep rows do not depend on the thread count", "[distinguish]") {
  const std::vector<double> grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const auto one = theorem1_sweep(grid, chsh_script(), {}, 1);
  const auto many = theorem1_sweep(grid, chsh_script(), {}, 8);
  std::ostringstream a, b;
  write_sweep_columnar(a, one);
  write_sweep_columnar(b, many);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("lambda\ttvd\ts_abs\tpurity\n", 0) == 0);
  CHECK(sweep_to_json(one).size() == grid.size());
}

TEST_CASE("channel-size comparison examples", "[distinguish]") {
  CHECK(corollary2_check({2, 3}, chsh_script()) <= 1e-10);
  CHECK(corollary2_check({2}, chsh_script()) == 0.0);
  CHECK(corollary2_check({2, 3}, chsh_script(), {}, 0.7) > 1e-6);
  CHECK_THROWS_AS(corollary2_check({2, 14}, chsh_script()), CapacityError);
}

TEST_CASE("no_signaling_check examples", "[distinguish]") {
  const std::vector<QuantumInstrument> variants{projective_measurement(0.0),
                                                projective_measurement(pi / 2), identity_instrument()};
  const std::vector<Round> bob{Round{Party::kBob, projective_measurement(0.0)}};

  const auto er = no_signaling_check(build_er_world(), variants, bob);
  CHECK(er.max_tvd <= 1e-15);
  CHECK_FALSE(er.classical_channel_assisted);
  REQUIRE(er.bob_marginals.size() == 3);
  CHECK_THAT(er.bob_marginals[0].at("0"), WithinAbs(0.5, 1e-15));

  CHECK(no_signaling_check(build_epr_world(2, 2, 0.8, 3), variants, bob).max_tvd <= 1e-10);

  // With the channel open, Bob can steer his basis on Alice's outcome.
  Round adaptive{Party::kBob, projective_measurement(0.0)};
  adaptive.variants.emplace("0", projective_measurement(pi / 2));
  const std::vector<QuantumInstrument> measurements{variants[0], variants[1]};
  const auto assisted = no_signaling_check(build_er_world(), measurements, {adaptive}, true);
  CHECK(assisted.classical_channel_assisted);
  CHECK(assisted.max_tvd > 0.1);

  CHECK_THROWS_AS(no_signaling_check(build_er_world(), {}, bob), ArgumentError);
}

TEST_CASE("frame_misalignment_demo examples", "[distinguish]") {
  const auto aligned = frame_misalignment_demo(0.0);
  CHECK_THAT(aligned.uncorrected.s_abs, WithinAbs(kTsirelsonBound, 1e-10));

  const auto quarter = frame_misalignment_demo(pi / 4);
  // Closed form: E = -cos(a - b - offset).
  const CHSHConfig cfg;
  const auto e = [&](double a, double b) { return -std::cos(a - b - pi / 4); };
  const double s = e(cfg.a, cfg.b) + e(cfg.a, cfg.b_prime) + e(cfg.a_prime, cfg.b) -
                   e(cfg.a_prime, cfg.b_prime);
  CHECK_THAT(quarter.uncorrected.s_abs, WithinAbs(std::abs(s), 1e-10));
  CHECK_THAT(quarter.uncorrected.s_abs, WithinAbs(2.0, 1e-10));
  CHECK_THAT(quarter.corrected.s_abs, WithinAbs(kTsirelsonBound, 1e-10));
}

TEST_CASE("property: zero coupling is invisible to every corpus script", "[distinguish][property]") {
  const auto er = build_er_world();
  for (const auto& script : corpus()) {
    INFO(script.name);
    const auto ref = accessible_distribution(er, script);
    CHECK_THAT(ref.total(), WithinAbs(1.0, 1e-10));
    for (std::uint64_t seed : {1u, 2u}) {
      for (std::size_t q : {2u, 3u}) {
        CHECK(total_variation(accessible_distribution(build_epr_world(q, 2, 0.0, seed), script), ref) <=
              1e-10);
      }
    }
  }
}

TEST_CASE("property: corpus distributions are normalized and non-negative", "[distinguish][property]") {
  const auto w = build_epr_world(2, 1, 0.9, 4);
  for (const auto& script : corpus()) {
    INFO(script.name);
    const auto d = accessible_distribution(w, script);
    CHECK_THAT(d.total(), WithinAbs(1.0, 1e-10));
    for (const auto& [t, p] : d.probabilities) CHECK(p >= -1e-12);
  }
}

TEST_CASE("property: total variation is a metric on corpus distributions", "[distinguish][property]") {
  std::vector<OutcomeDistribution> ds;
  const auto script = chsh_script();
  for (double lambda : {0.0, 0.3, 0.6, 0.9, 1.2}) {
    ds.push_back(accessible_distribution(build_epr_world(2, 1, lambda, 1), script));
  }
  for (const auto& p : ds) {
    CHECK(total_variation(p, p) == 0.0);
    for (const auto& q : ds) {
      CHECK(total_variation(p, q) == total_variation(q, p));
      for (const auto& r : ds) CHECK(total_variation(p, r) <= total_variation(p, q) + total_variation(q, r) + 1e-12);
    }
  }
  for (std::size_t i = 1; i < ds.size(); ++i) CHECK(total_variation(ds[0], ds[i]) > 1e-6);
}

TEST_CASE("property: no-signaling holds for corpus Alice instruments", "[distinguish][property]") {
  std::vector<QuantumInstrument> variants;
  for (const auto& script : corpus()) {
    for (const auto& r : script.rounds) {
      if (r.party == Party::kAlice) variants.push_back(r.instrument);
    }
  }
  REQUIRE(variants.size() >= 3);
  const std::vector<Round> bob{Round{Party::kBob, random_setting_measurement(pi / 4, -pi / 4)}};
  for (double lambda : {0.0, 0.5, 1.0}) {
    CHECK(no_signaling_check(build_epr_world(2, 2, lambda, 8), variants, bob).max_tvd <= 1e-10);
  }
}

TEST_CASE("property: exact distribution agrees with sampled CHSH frequencies", "[distinguish][property]") {
  const auto world = build_epr_world(2, 1, 0.5, 2);
  const auto d = accessible_distribution(world, chsh_script());
  CHSHConfig cfg;
  cfg.trials = 10000;
  cfg.seed = 4;
  const auto sample = sample_chsh(world, cfg);
  std::map<std::string, double> counts;
  for (const auto& t : sample.transcript) {
    const std::string key = std::to_string(t.alice_setting) + (t.alice_outcome > 0 ? "0" : "1") +
                            std::to_string(t.bob_setting) + (t.bob_outcome > 0 ? "0" : "1");
    counts[key] += 1.0;
  }
  for (const auto& [t, p] : d.probabilities) {
    INFO(t);
    const double se = std::sqrt(p * (1 - p) / cfg.trials);
    CHECK(std::abs(counts[t] / cfg.trials - p) <= 5 * se + 1e-12);
  }
}
