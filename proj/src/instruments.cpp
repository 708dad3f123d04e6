#include "locc/instruments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "locc/errors.hpp"

namespace locc {

namespace {

double weight_of(const Branch& b, std::size_t k) { return b.weights.empty() ? 1.0 : b.weights[k]; }

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

}  // namespace

QuantumInstrument::QuantumInstrument(std::vector<Branch> branches) : branches_(std::move(branches)) {
  if (branches_.empty()) throw ArgumentError("instrument has no branches");
  std::set<std::string> labels;
  for (auto& b : branches_) {
    if (!labels.insert(b.outcome).second) {
      throw ArgumentError(fmt::format("duplicate outcome label '{}'", b.outcome));
    }
    if (b.kraus.empty()) {
      throw ArgumentError(fmt::format("branch '{}' has no Kraus operators", b.outcome));
    }
    if (!b.weights.empty() && b.weights.size() != b.kraus.size()) {
      throw ArgumentError(fmt::format("branch '{}': {} weights for {} operators", b.outcome,
                                      b.weights.size(), b.kraus.size()));
    }
    for (const auto& k : b.kraus) {
      if (k.rows() != k.cols()) {
        throw ArgumentError(fmt::format("branch '{}': Kraus operator is not square", b.outcome));
      }
      if (dimension_ == 0) dimension_ = static_cast<std::size_t>(k.rows());
      if (static_cast<std::size_t>(k.rows()) != dimension_) {
        throw ArgumentError(fmt::format("branch '{}': Kraus operator is {}x{}, expected {}",
                                        b.outcome, k.rows(), k.cols(), dimension_));
      }
      if (!k.allFinite()) {
        throw ArgumentError(fmt::format("branch '{}': non-finite Kraus entries", b.outcome));
      }
    }
    if (std::all_of(b.weights.begin(), b.weights.end(), [](double w) { return w == 1.0; })) {
      b.weights.clear();
    }
  }
  if (dimension_ < 1) throw ArgumentError("instrument dimension must be positive");
}

std::vector<std::string> QuantumInstrument::outcomes() const {
  std::vector<std::string> out;
  out.reserve(branches_.size());
  for (const auto& b : branches_) out.push_back(b.outcome);
  return out;
}

const Branch& QuantumInstrument::branch(const std::string& outcome) const {
  for (const auto& b : branches_) {
    if (b.outcome == outcome) return b;
  }
  throw ArgumentError(fmt::format("unknown outcome '{}'", outcome));
}

ComplexMatrix QuantumInstrument::apply_branch(std::size_t index, const ComplexMatrix& rho) const {
  const auto& b = branches_.at(index);
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t k = 0; k < b.kraus.size(); ++k) {
    out.noalias() += weight_of(b, k) * (b.kraus[k] * rho * b.kraus[k].adjoint());
  }
  return out;
}

ComplexMatrix QuantumInstrument::apply_total(const ComplexMatrix& rho) const {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t i = 0; i < branches_.size(); ++i) out += apply_branch(i, rho);
  return out;
}

KrausSet::KrausSet(std::vector<ComplexMatrix> operators, std::vector<std::string> labels,
                   const InstrumentTolerances& tol)
    : operators_(std::move(operators)), labels_(std::move(labels)) {
  if (operators_.empty()) throw ArgumentError("Kraus set is empty");
  if (labels_.empty()) {
    for (std::size_t k = 0; k < operators_.size(); ++k) labels_.push_back(fmt::format("k{}", k));
  }
  if (labels_.size() != operators_.size()) {
    throw ArgumentError("Kraus set: label count differs from operator count");
  }
  const auto d = operators_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& k : operators_) {
    if (k.rows() != d || k.cols() != d) throw ArgumentError("Kraus set: mismatched dimensions");
    sum += k.adjoint() * k;
  }
  const double defect = (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > tol.tp) {
    throw ContractError(fmt::format("Kraus set is not trace preserving (defect {:.3g})", defect));
  }
}

QuantumInstrument KrausSet::as_instrument(const std::string& outcome) const {
  return QuantumInstrument({Branch{outcome, operators_, {}}});
}

std::string ValidationReport::describe() const {
  if (passed()) return "pass";
  std::ostringstream os;
  for (const auto& v : violations) {
    if (v.kind == Violation::Kind::kNotCompletelyPositive) {
      os << fmt::format("branch '{}' not completely positive (Choi min eigenvalue {:.3g}); ",
                        v.branch, -v.defect);
    } else {
      os << fmt::format("not trace preserving (completeness defect {:.3g}); ", v.defect);
    }
  }
  return os.str();
}

ComplexMatrix choi_matrix(const QuantumInstrument& inst, std::size_t branch_index) {
  const auto& b = inst.branches().at(branch_index);
  const auto d = static_cast<Eigen::Index>(inst.dimension());
  ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
  ComplexVector v(d * d);
  for (std::size_t k = 0; k < b.kraus.size(); ++k) {
    // Entry (i, a) of |K>> is K(a, i).
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index a = 0; a < d; ++a) v(i * d + a) = b.kraus[k](a, i);
    }
    choi.noalias() += weight_of(b, k) * (v * v.adjoint());
  }
  return choi;
}

ComplexMatrix completeness_sum(const QuantumInstrument& inst) {
  const auto d = static_cast<Eigen::Index>(inst.dimension());
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& b : inst.branches()) {
    for (std::size_t k = 0; k < b.kraus.size(); ++k) {
      sum.noalias() += weight_of(b, k) * (b.kraus[k].adjoint() * b.kraus[k]);
    }
  }
  return sum;
}

ValidationReport validate_instrument(const QuantumInstrument& inst,
                                     const InstrumentTolerances& tol) {
  ValidationReport report;
  for (std::size_t i = 0; i < inst.branches().size(); ++i) {
    const auto& b = inst.branches()[i];
    const double lo = min_eigenvalue(choi_matrix(inst, i));
    if (lo < -tol.psd) {
      report.violations.push_back({Violation::Kind::kNotCompletelyPositive, b.outcome, -lo});
    }
  }
  const auto d = static_cast<Eigen::Index>(inst.dimension());
  const double defect =
      (completeness_sum(inst) - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > tol.tp) {
    report.violations.push_back({Violation::Kind::kNotTracePreserving, "", defect});
  }
  return report;
}

std::vector<InstrumentOutcomeRecord> apply_instrument(const QuantumInstrument& inst,
                                                      const DensityMatrix& rho,
                                                      const std::vector<std::string>& targets,
                                                      const InstrumentTolerances& tol) {
  const std::size_t target_dim = rho.layout().dimension_of(targets);
  if (target_dim != inst.dimension()) {
    throw ArgumentError(fmt::format("instrument dimension {} does not match target dimension {}",
                                    inst.dimension(), target_dim));
  }
  if (auto report = validate_instrument(inst, tol); !report.passed()) {
    throw ContractError("invalid instrument: " + report.describe());
  }

  const bool whole = targets == rho.layout().labels();
  std::vector<InstrumentOutcomeRecord> records;
  records.reserve(inst.branches().size());
  for (const auto& b : inst.branches()) {
    ComplexMatrix out = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (std::size_t k = 0; k < b.kraus.size(); ++k) {
      const ComplexMatrix op = whole ? b.kraus[k] : embed_operator(b.kraus[k], rho.layout(), targets);
      out.noalias() += weight_of(b, k) * (op * rho.matrix() * op.adjoint());
    }
    const double p = std::clamp(out.trace().real(), 0.0, 1.0);
    InstrumentOutcomeRecord rec{b.outcome, p, std::nullopt};
    if (p > tol.prob) {
      ComplexMatrix post = out / p;
      post = 0.5 * (post + post.adjoint()).eval();
      rec.post_state.emplace(std::move(post), rho.layout());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

QuantumInstrument one_way_local_instrument(const SubsystemLayout& layout, const std::string& party,
                                           const QuantumInstrument& local,
                                           const std::map<std::string, KrausSet>& others_tp) {
  const auto party_pos = layout.index_of(party);
  if (layout.factors()[party_pos].dimension != local.dimension()) {
    throw ArgumentError(fmt::format("local instrument dimension {} does not match factor '{}'",
                                    local.dimension(), party));
  }
  if (auto report = validate_instrument(local); !report.passed()) {
    throw ContractError("invalid local instrument: " + report.describe());
  }
  if (others_tp.contains(party)) {
    throw ArgumentError(fmt::format("'{}' is the acting party, not another factor", party));
  }
  for (const auto& [label, channel] : others_tp) {
    const auto pos = layout.index_of(label);
    if (layout.factors()[pos].dimension != channel.dimension()) {
      throw ArgumentError(fmt::format("channel on '{}' has wrong dimension", label));
    }
  }

  // Kraus lists per factor in layout order; the party slot is filled per branch.
  std::vector<std::vector<ComplexMatrix>> per_factor;
  for (const auto& f : layout.factors()) {
    if (f.label == party) {
      per_factor.emplace_back();
    } else if (auto it = others_tp.find(f.label); it != others_tp.end()) {
      per_factor.push_back(it->second.operators());
    } else {
      const auto d = static_cast<Eigen::Index>(f.dimension);
      per_factor.push_back({ComplexMatrix::Identity(d, d)});
    }
  }

  std::vector<Branch> branches;
  for (const auto& lb : local.branches()) {
    Branch out{lb.outcome, {}, {}};
    const bool weighted = !lb.weights.empty();
    for (std::size_t k = 0; k < lb.kraus.size(); ++k) {
      per_factor[party_pos] = {lb.kraus[k]};
      // Expand the product over all factor Kraus choices.
      std::vector<ComplexMatrix> partial{ComplexMatrix::Identity(1, 1)};
      for (const auto& choices : per_factor) {
        std::vector<ComplexMatrix> next;
        next.reserve(partial.size() * choices.size());
        for (const auto& p : partial) {
          for (const auto& c : choices) next.push_back(tensor_product(p, c));
        }
        partial = std::move(next);
      }
      for (auto& op : partial) {
        out.kraus.push_back(std::move(op));
        if (weighted) out.weights.push_back(lb.weights[k]);
      }
    }
    branches.push_back(std::move(out));
  }
  return QuantumInstrument(std::move(branches));
}

QuantumInstrument coarse_grain(const QuantumInstrument& inst,
                               const CoarseGrainingPartition& partition) {
  std::set<std::string> covered;
  std::set<std::string> group_labels;
  std::vector<Branch> merged;
  for (const auto& g : partition.groups) {
    if (g.members.empty()) throw ArgumentError(fmt::format("group '{}' is empty", g.label));
    if (!group_labels.insert(g.label).second) {
      throw ArgumentError(fmt::format("duplicate group label '{}'", g.label));
    }
    Branch out{g.label, {}, {}};
    bool weighted = false;
    for (const auto& m : g.members) {
      if (!covered.insert(m).second) {
        throw ArgumentError(fmt::format("outcome '{}' appears in more than one group", m));
      }
      const auto& b = inst.branch(m);
      weighted = weighted || !b.weights.empty();
    }
    for (const auto& m : g.members) {
      const auto& b = inst.branch(m);
      for (std::size_t k = 0; k < b.kraus.size(); ++k) {
        out.kraus.push_back(b.kraus[k]);
        if (weighted) out.weights.push_back(weight_of(b, k));
      }
    }
    merged.push_back(std::move(out));
  }
  if (covered.size() != inst.branches().size()) {
    throw ArgumentError(fmt::format("partition covers {} of {} outcomes", covered.size(),
                                    inst.branches().size()));
  }
  return QuantumInstrument(std::move(merged));
}

QuantumInstrument projective_measurement(double angle) {
  // Eigenvectors of cos(a) Z + sin(a) X.
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  ComplexVector plus(2), minus(2);
  plus << c, s;
  minus << -s, c;
  return QuantumInstrument({Branch{"0", {projector(plus)}, {}}, Branch{"1", {projector(minus)}, {}}});
}

QuantumInstrument identity_instrument(std::size_t dimension) {
  const auto d = static_cast<Eigen::Index>(dimension);
  return QuantumInstrument({Branch{"id", {ComplexMatrix::Identity(d, d)}, {}}});
}

QuantumInstrument random_setting_measurement(double angle0, double angle1) {
  std::vector<Branch> branches;
  const double amp = std::sqrt(0.5);
  for (int setting = 0; setting < 2; ++setting) {
    const auto m = projective_measurement(setting == 0 ? angle0 : angle1);
    for (const auto& b : m.branches()) {
      branches.push_back(Branch{fmt::format("{}{}", setting, b.outcome), {amp * b.kraus.front()}, {}});
    }
  }
  return QuantumInstrument(std::move(branches));
}

KrausSet identity_channel(std::size_t dimension) {
  const auto d = static_cast<Eigen::Index>(dimension);
  return KrausSet({ComplexMatrix::Identity(d, d)}, {"id"});
}

KrausSet depolarizing_channel(double p) {
  if (!(p >= 0.0 && p <= 4.0 / 3.0)) throw ArgumentError(fmt::format("depolarizing p = {}", p));
  const double a = std::sqrt(1.0 - 3.0 * p / 4.0), b = std::sqrt(p / 4.0);
  return KrausSet({a * pauli::identity(), b * pauli::x(), b * pauli::y(), b * pauli::z()},
                  {"I", "X", "Y", "Z"});
}

KrausSet dephasing_channel(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError(fmt::format("dephasing p = {}", p));
  return KrausSet({std::sqrt(1.0 - p / 2.0) * pauli::identity(), std::sqrt(p / 2.0) * pauli::z()},
                  {"I", "Z"});
}

int outcome_sign(const std::string& outcome) {
  if (outcome == "0") return +1;
  if (outcome == "1") return -1;
  throw ArgumentError(fmt::format("outcome '{}' has no +/-1 value", outcome));
}

}  // namespace locc
