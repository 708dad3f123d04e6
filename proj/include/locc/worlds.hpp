#pragma once

// The two configurations Alice and Bob may be embedded in.
//
// ER:  their boundary qubits q_A, q_B are directly identified; the channel
//      uses no environment degrees of freedom and they share an exact
//      singlet.
// EPR: the singlet is carried by two channel qubits Q_0, Q_1 of the
//      environment E = Q Q̄, which evolves under
//          H_E = H_Q (x) I + I (x) H_Q̄ + lambda * H_QQ̄
//      before being handed to the boundary.
//
// Full EPR layout: [q_A, q_B, Q_0 .. Q_{q-1}, Qb_0 .. Qb_{m-1}].

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "locc/linalg.hpp"

namespace locc {

enum class WorldMode { kER, kEPR };

struct HamiltonianDecomposition {
  HermitianOperator h_q;         ///< on the Q factors
  HermitianOperator h_qbar;      ///< on the Q̄ factors
  HermitianOperator h_coupling;  ///< on Q then Q̄
  double lambda = 0.0;

  /// H_Q (x) I + I (x) H_Q̄ + lambda * H_QQ̄ on the environment layout.
  HermitianOperator total() const;
};

/// Opaque coordinates of where each party accesses its qubit. They label
/// the run and never enter a computation.
struct LocationLabels {
  std::string x_a = "x_A";
  std::string x_b = "x_B";
};

class World {
 public:
  WorldMode mode() const noexcept { return mode_; }
  std::size_t q_dim() const noexcept { return q_dim_; }
  std::size_t qbar_dim() const noexcept { return qbar_dim_; }
  double lambda() const noexcept { return decomposition_ ? decomposition_->lambda : 0.0; }
  std::uint64_t seed() const noexcept { return seed_; }
  double evolution_time() const noexcept { return evolution_time_; }
  const LocationLabels& locations() const noexcept { return locations_; }
  /// EPR only.
  const HamiltonianDecomposition& decomposition() const;

  /// Boundary pair plus environment (just the pair for ER).
  SubsystemLayout full_layout() const;
  /// Q then Q̄. EPR only.
  SubsystemLayout environment_layout() const;
  std::size_t total_dimension() const { return full_layout().dimension(); }

  /// "ER" or "EPR(q_dim=..,qbar_dim=..,lambda=..,seed=..)".
  std::string identifier() const;

  World with_locations(LocationLabels labels) const;

 private:
  friend World build_er_world(LocationLabels);
  friend World build_epr_world(std::size_t, std::size_t, double, std::uint64_t, double,
                               LocationLabels);
  World() = default;

  WorldMode mode_ = WorldMode::kER;
  std::size_t q_dim_ = 0;
  std::size_t qbar_dim_ = 0;
  std::optional<HamiltonianDecomposition> decomposition_;
  std::uint64_t seed_ = 0;
  double evolution_time_ = 1.0;
  LocationLabels locations_;
};

struct BoundaryPair {
  DensityMatrix state;  ///< layout (q_A, q_B)
  std::string provenance;
};

/// {"q_A", "q_B"}.
std::vector<std::string> pair_labels();
std::vector<std::string> q_labels(std::size_t q_dim);
std::vector<std::string> qbar_labels(std::size_t qbar_dim);

/// (|01> - |10>) / sqrt(2) on (q_A, q_B).
DensityMatrix singlet();

World build_er_world(LocationLabels locations = {});

/// H_Q = 0; H_Q̄ = sum of random single-qubit Hermitian terms (entries in
/// [-1, 1], drawn from `seed`); H_QQ̄ = sum Z_i Z_j over Q̄ qubits j and every
/// channel qubit i except Bob's carrier Q_1 (coupling both carriers equally
/// would leave the singlet untouched).
World build_epr_world(std::size_t q_dim, std::size_t qbar_dim, double lambda, std::uint64_t seed,
                      double evolution_time = 1.0, LocationLabels locations = {});

BoundaryPair deliver_pair(const World& world);

struct PurityPoint {
  double lambda;
  double purity;
};

/// Pair purity of build_epr_world(q_dim, qbar_dim, lambda, seed, t) for each
/// lambda of an ascending, non-empty grid.
std::vector<PurityPoint> channel_purity_profile(const std::vector<double>& lambda_grid,
                                                std::size_t q_dim, std::size_t qbar_dim,
                                                std::uint64_t seed, double evolution_time = 1.0);

}  // namespace locc
