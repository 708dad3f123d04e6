#include "locc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "locc/errors.hpp"

namespace locc {

namespace {

std::size_t checked_product(std::size_t a, std::size_t b, std::size_t cap) {
  if (a != 0 && b > cap / a) {
    throw CapacityError(fmt::format("dimension {}x{} exceeds cap {}", a, b, cap));
  }
  const std::size_t p = a * b;
  if (p > cap) {
    throw CapacityError(fmt::format("dimension {} exceeds cap {}", p, cap));
  }
  return p;
}

// Splits every flat index of a layout into (index over `selected` factors in
// the given order, index over the remaining factors in layout order).
struct IndexSplit {
  std::vector<std::size_t> selected;
  std::vector<std::size_t> rest;
  std::size_t selected_dim = 1;
  std::size_t rest_dim = 1;
};

IndexSplit split_indices(const SubsystemLayout& layout, const std::vector<std::size_t>& positions) {
  const auto& factors = layout.factors();
  const std::size_t n = factors.size();

  std::vector<bool> is_selected(n, false);
  for (auto p : positions) is_selected[p] = true;

  // Weight of each factor digit in the selected / rest index.
  std::vector<std::size_t> sel_weight(n, 0), rest_weight(n, 0);
  IndexSplit out;
  for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
    sel_weight[*it] = out.selected_dim;
    out.selected_dim *= factors[*it].dimension;
  }
  for (std::size_t f = n; f-- > 0;) {
    if (is_selected[f]) continue;
    rest_weight[f] = out.rest_dim;
    out.rest_dim *= factors[f].dimension;
  }

  const std::size_t dim = layout.dimension();
  out.selected.resize(dim);
  out.rest.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t rem = i, s = 0, r = 0;
    for (std::size_t f = n; f-- > 0;) {
      const std::size_t digit = rem % factors[f].dimension;
      rem /= factors[f].dimension;
      if (is_selected[f]) {
        s += digit * sel_weight[f];
      } else {
        r += digit * rest_weight[f];
      }
    }
    out.selected[i] = s;
    out.rest[i] = r;
  }
  return out;
}

std::vector<std::size_t> positions_of(const SubsystemLayout& layout,
                                      const std::vector<std::string>& labels) {
  std::vector<std::size_t> pos;
  pos.reserve(labels.size());
  for (const auto& l : labels) {
    const auto p = layout.index_of(l);
    if (std::find(pos.begin(), pos.end(), p) != pos.end()) {
      throw ArgumentError(fmt::format("label '{}' listed twice", l));
    }
    pos.push_back(p);
  }
  return pos;
}

void require_square(const ComplexMatrix& m, std::size_t dim, std::string_view what) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != dim) {
    throw ArgumentError(fmt::format("{}: matrix is {}x{}, layout dimension is {}", what, m.rows(),
                                    m.cols(), dim));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::vector<Factor> factors, std::size_t max_dimension)
    : factors_(std::move(factors)) {
  if (factors_.empty()) throw ArgumentError("layout needs at least one factor");
  std::unordered_set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dimension < 2) {
      throw ArgumentError(fmt::format("factor '{}' has dimension {} < 2", f.label, f.dimension));
    }
    if (!seen.insert(f.label).second) {
      throw ArgumentError(fmt::format("duplicate factor label '{}'", f.label));
    }
    dimension_ = checked_product(dimension_, f.dimension, max_dimension);
  }
}

SubsystemLayout SubsystemLayout::qubits(const std::vector<std::string>& labels) {
  std::vector<Factor> f;
  f.reserve(labels.size());
  for (const auto& l : labels) f.push_back({l, 2});
  return SubsystemLayout(std::move(f));
}

bool SubsystemLayout::contains(std::string_view label) const noexcept {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

std::size_t SubsystemLayout::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  throw ArgumentError(fmt::format("unknown factor label '{}'", label));
}

std::vector<std::string> SubsystemLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

std::size_t SubsystemLayout::dimension_of(const std::vector<std::string>& labels) const {
  std::size_t d = 1;
  for (const auto& l : labels) d *= factors_[index_of(l)].dimension;
  return d;
}

SubsystemLayout SubsystemLayout::concat(const SubsystemLayout& other,
                                        std::size_t max_dimension) const {
  auto f = factors_;
  f.insert(f.end(), other.factors_.begin(), other.factors_.end());
  return SubsystemLayout(std::move(f), max_dimension);
}

SubsystemLayout SubsystemLayout::subset(const std::vector<std::string>& keep) const {
  auto pos = positions_of(*this, keep);
  if (pos.empty()) throw ArgumentError("empty factor subset");
  std::sort(pos.begin(), pos.end());
  std::vector<Factor> f;
  for (auto p : pos) f.push_back(factors_[p]);
  return SubsystemLayout(std::move(f));
}

SubsystemLayout SubsystemLayout::relabel(const std::vector<std::string>& labels) const {
  if (labels.size() != factors_.size()) {
    throw ArgumentError(fmt::format("relabel: {} labels for {} factors", labels.size(), size()));
  }
  auto f = factors_;
  for (std::size_t i = 0; i < f.size(); ++i) f[i].label = labels[i];
  return SubsystemLayout(std::move(f));
}

// ---------------------------------------------------------------------------
// Value types

PureState::PureState(ComplexVector amplitudes, SubsystemLayout layout, const Tolerances& tol)
    : amplitudes_(std::move(amplitudes)), layout_(std::move(layout)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.dimension()) {
    throw ArgumentError(fmt::format("state has {} amplitudes, layout dimension is {}",
                                    amplitudes_.size(), layout_.dimension()));
  }
  if (!amplitudes_.allFinite()) throw ArgumentError("state has non-finite amplitudes");
  const double n = amplitudes_.norm();
  if (std::abs(n - 1.0) > tol.norm) {
    throw ArgumentError(fmt::format("state norm {} is not 1", n));
  }
}

PureState PureState::basis(SubsystemLayout layout, std::size_t index) {
  if (index >= layout.dimension()) {
    throw ArgumentError(fmt::format("basis index {} out of range", index));
  }
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(layout.dimension()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v), std::move(layout));
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix, SubsystemLayout layout, const Tolerances& tol)
    : matrix_(std::move(matrix)), layout_(std::move(layout)) {
  require_square(matrix_, layout_.dimension(), "density matrix");
  if (!all_finite(matrix_)) throw ArgumentError("density matrix has non-finite entries");
  if (!is_hermitian(matrix_, tol.herm)) throw ArgumentError("density matrix is not Hermitian");
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw ArgumentError(fmt::format("density matrix trace {} is not 1", tr));
  }
  const double lo = min_eigenvalue(matrix_);
  if (lo < -tol.psd) {
    throw ArgumentError(fmt::format("density matrix has negative eigenvalue {}", lo));
  }
}

DensityMatrix::DensityMatrix(const PureState& psi)
    : DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.layout()) {}

DensityMatrix DensityMatrix::maximally_mixed(SubsystemLayout layout) {
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  ComplexMatrix m = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix(std::move(m), std::move(layout));
}

DensityMatrix DensityMatrix::with_labels(const std::vector<std::string>& labels) const {
  return DensityMatrix(matrix_, layout_.relabel(labels));
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix, SubsystemLayout layout,
                                     const Tolerances& tol)
    : matrix_(std::move(matrix)), layout_(std::move(layout)) {
  require_square(matrix_, layout_.dimension(), "operator");
  if (!all_finite(matrix_)) throw ArgumentError("operator has non-finite entries");
  if (!is_hermitian(matrix_, tol.herm)) throw ArgumentError("operator is not Hermitian");
}

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }
ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

bool all_finite(const ComplexMatrix& m) noexcept { return m.allFinite(); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const ComplexMatrix& m) {
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Operations

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                             std::size_t max_dimension) {
  checked_product(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.rows()),
                  max_dimension);
  checked_product(static_cast<std::size_t>(a.cols()), static_cast<std::size_t>(b.cols()),
                  max_dimension);
  return Eigen::kroneckerProduct(a, b).eval();
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  auto layout = a.layout().concat(b.layout());
  return DensityMatrix(tensor_product(a.matrix(), b.matrix()), std::move(layout));
}

PureState tensor_product(const PureState& a, const PureState& b) {
  auto layout = a.layout().concat(b.layout());
  ComplexVector v = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval();
  return PureState(std::move(v), std::move(layout));
}

HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b) {
  auto layout = a.layout().concat(b.layout());
  return HermitianOperator(tensor_product(a.matrix(), b.matrix()), std::move(layout));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemLayout& layout,
                            const std::vector<std::string>& keep) {
  require_square(m, layout.dimension(), "partial_trace");
  if (keep.empty()) throw ArgumentError("partial_trace: keep set is empty");
  auto pos = positions_of(layout, keep);
  std::sort(pos.begin(), pos.end());
  const auto split = split_indices(layout, pos);

  // Bucket full indices by their traced-out digits.
  std::vector<std::vector<std::size_t>> buckets(split.rest_dim);
  for (std::size_t i = 0; i < layout.dimension(); ++i) buckets[split.rest[i]].push_back(i);

  const auto kd = static_cast<Eigen::Index>(split.selected_dim);
  ComplexMatrix out = ComplexMatrix::Zero(kd, kd);
  for (const auto& bucket : buckets) {
    for (auto i : bucket) {
      const auto r = static_cast<Eigen::Index>(split.selected[i]);
      for (auto j : bucket) {
        out(r, static_cast<Eigen::Index>(split.selected[j])) +=
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  auto reduced = partial_trace(rho.matrix(), rho.layout(), keep);
  return DensityMatrix(std::move(reduced), rho.layout().subset(keep));
}

ComplexMatrix embed_operator(const ComplexMatrix& op, const SubsystemLayout& layout,
                             const std::vector<std::string>& targets) {
  if (targets.empty()) throw ArgumentError("embed_operator: no targets");
  const auto pos = positions_of(layout, targets);
  const std::size_t target_dim = layout.dimension_of(targets);
  require_square(op, target_dim, "embed_operator");

  const auto split = split_indices(layout, pos);
  std::vector<std::vector<std::size_t>> buckets(split.rest_dim);
  for (std::size_t i = 0; i < layout.dimension(); ++i) buckets[split.rest[i]].push_back(i);

  const auto d = static_cast<Eigen::Index>(layout.dimension());
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& bucket : buckets) {
    for (auto i : bucket) {
      for (auto j : bucket) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            op(static_cast<Eigen::Index>(split.selected[i]),
               static_cast<Eigen::Index>(split.selected[j]));
      }
    }
  }
  return out;
}

ComplexMatrix propagator(const HermitianOperator& h, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
  const ComplexMatrix& v = es.eigenvectors();
  ComplexVector phases = (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
  return v * phases.asDiagonal() * v.adjoint();
}

DensityMatrix evolve(const DensityMatrix& rho, const HermitianOperator& h, double t) {
  if (!(rho.layout() == h.layout())) throw ArgumentError("evolve: layout mismatch");
  if (t == 0.0) return rho;
  const ComplexMatrix u = propagator(h, t);
  ComplexMatrix out = u * rho.matrix() * u.adjoint();
  // Re-symmetrise to remove rounding asymmetry.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out), rho.layout());
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dimension() != b.dimension()) {
    throw ArgumentError(fmt::format("trace_distance: dimensions {} and {} differ", a.dimension(),
                                    b.dimension()));
  }
  const ComplexMatrix diff = a.matrix() - b.matrix();
  const ComplexMatrix h = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  const double d = 0.5 * es.eigenvalues().cwiseAbs().sum();
  return std::clamp(d, 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.matrix().cwiseAbs2().sum();
}

double expectation(const DensityMatrix& rho, const HermitianOperator& op) {
  if (!(rho.layout() == op.layout())) throw ArgumentError("expectation: layout mismatch");
  // Tr(rho O) without forming the product.
  return (rho.matrix().transpose().cwiseProduct(op.matrix())).sum().real();
}

}  // namespace locc
