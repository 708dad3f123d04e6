#pragma once

// Quantum instruments in Kraus form.
//
// A branch is the map rho -> sum_k w_k K_k rho K_k^dagger. Physical branches
// have all weights equal to one; other weights are accepted so that
// validate_instrument can be pointed at maps that are not completely
// positive.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locc/linalg.hpp"

namespace locc {

struct InstrumentTolerances {
  double tp = 1e-9;     ///< completeness sum_k K^dagger K = I
  double psd = 1e-9;    ///< Choi matrix positivity
  double prob = 1e-12;  ///< floor below which a post-state is not reported
};

inline constexpr InstrumentTolerances kDefaultInstrumentTolerances{};

struct Branch {
  std::string outcome;
  std::vector<ComplexMatrix> kraus;
  /// Per-operator weight; empty means every weight is 1.
  std::vector<double> weights;
};

class QuantumInstrument {
 public:
  /// Checks structure only (non-empty, unique labels, equal square
  /// dimensions); use validate_instrument for CP/TP.
  explicit QuantumInstrument(std::vector<Branch> branches);

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  std::vector<std::string> outcomes() const;
  /// Throws ArgumentError for an unknown label.
  const Branch& branch(const std::string& outcome) const;

  /// The branch map applied to an arbitrary operator.
  ComplexMatrix apply_branch(std::size_t index, const ComplexMatrix& rho) const;
  /// Sum of all branch maps (the trace-preserving channel).
  ComplexMatrix apply_total(const ComplexMatrix& rho) const;

 private:
  std::vector<Branch> branches_;
  std::size_t dimension_ = 0;
};

/// Single-branch trace-preserving CP map.
class KrausSet {
 public:
  explicit KrausSet(std::vector<ComplexMatrix> operators, std::vector<std::string> labels = {},
                    const InstrumentTolerances& tol = kDefaultInstrumentTolerances);

  const std::vector<ComplexMatrix>& operators() const noexcept { return operators_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t dimension() const { return static_cast<std::size_t>(operators_.front().rows()); }

  /// One-branch instrument with the given outcome label.
  QuantumInstrument as_instrument(const std::string& outcome) const;

 private:
  std::vector<ComplexMatrix> operators_;
  std::vector<std::string> labels_;
};

struct Violation {
  enum class Kind { kNotCompletelyPositive, kNotTracePreserving };
  Kind kind;
  std::string branch;  ///< empty for the whole-instrument completeness check
  double defect;       ///< -min Choi eigenvalue, or max |sum K^dagger K - I|
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool passed() const noexcept { return violations.empty(); }
  std::string describe() const;
};

/// Choi matrix sum_ij |i><j| (x) E(|i><j|) of one branch.
ComplexMatrix choi_matrix(const QuantumInstrument& inst, std::size_t branch_index);
/// sum over branches of sum_k w_k K^dagger K.
ComplexMatrix completeness_sum(const QuantumInstrument& inst);

ValidationReport validate_instrument(const QuantumInstrument& inst,
                                     const InstrumentTolerances& tol = kDefaultInstrumentTolerances);

struct InstrumentOutcomeRecord {
  std::string outcome;
  double probability;
  /// Absent when probability <= tol.prob.
  std::optional<DensityMatrix> post_state;
};

/// Applies `inst` to the `targets` factors of `rho` (identity elsewhere).
std::vector<InstrumentOutcomeRecord> apply_instrument(
    const QuantumInstrument& inst, const DensityMatrix& rho, const std::vector<std::string>& targets,
    const InstrumentTolerances& tol = kDefaultInstrumentTolerances);

/// Lifts a one-party instrument to the joint space: each branch becomes
/// (x)_{other} T_other (x) E_party in layout order. Factors missing from
/// `others_tp` get the identity channel.
QuantumInstrument one_way_local_instrument(const SubsystemLayout& layout, const std::string& party,
                                           const QuantumInstrument& local,
                                           const std::map<std::string, KrausSet>& others_tp = {});

struct CoarseGrainingPartition {
  struct Group {
    std::string label;
    std::vector<std::string> members;
  };
  std::vector<Group> groups;
};

/// Merges member branches of each group by concatenating their Kraus lists.
QuantumInstrument coarse_grain(const QuantumInstrument& inst,
                               const CoarseGrainingPartition& partition);

// Stock instruments on a single qubit. Measurement outcomes are "0" for the
// +1 eigenvalue and "1" for -1.

/// Projective measurement of cos(angle) Z + sin(angle) X.
QuantumInstrument projective_measurement(double angle);
QuantumInstrument identity_instrument(std::size_t dimension = 2);
/// Two settings chosen with probability 1/2 each; outcomes "<setting><result>".
QuantumInstrument random_setting_measurement(double angle0, double angle1);

KrausSet identity_channel(std::size_t dimension = 2);
KrausSet depolarizing_channel(double p);
KrausSet dephasing_channel(double p);

/// +1 for outcome "0", -1 for "1".
int outcome_sign(const std::string& outcome);

}  // namespace locc
