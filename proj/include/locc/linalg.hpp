#pragma once

// Dense complex linear algebra on tensor-product Hilbert spaces.
//
// Index convention: factor 0 of a SubsystemLayout is the most significant
// digit of a basis index, i.e. |i_0 i_1 ... i_{n-1}> has flat index
// i_0 * d_1 * ... * d_{n-1} + ... + i_{n-1}. Kronecker products follow the
// same order.

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace locc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct Tolerances {
  double herm = 1e-10;
  double trace = 1e-10;
  double norm = 1e-10;
  double psd = 1e-9;
  std::size_t max_dimension = std::size_t{1} << 14;
};

inline constexpr Tolerances kDefaultTolerances{};

struct Factor {
  std::string label;
  std::size_t dimension = 2;

  bool operator==(const Factor&) const = default;
};

/// Ordered list of labelled tensor factors.
class SubsystemLayout {
 public:
  explicit SubsystemLayout(std::vector<Factor> factors,
                           std::size_t max_dimension = kDefaultTolerances.max_dimension);

  /// Layout of qubits with the given labels.
  static SubsystemLayout qubits(const std::vector<std::string>& labels);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t size() const noexcept { return factors_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }

  bool contains(std::string_view label) const noexcept;
  /// Position of `label`; throws ArgumentError if absent.
  std::size_t index_of(std::string_view label) const;
  std::vector<std::string> labels() const;
  /// Product of the dimensions of the named factors.
  std::size_t dimension_of(const std::vector<std::string>& labels) const;

  SubsystemLayout concat(const SubsystemLayout& other,
                         std::size_t max_dimension = kDefaultTolerances.max_dimension) const;
  /// Kept factors in their original order.
  SubsystemLayout subset(const std::vector<std::string>& keep) const;
  /// Same dimensions, new labels.
  SubsystemLayout relabel(const std::vector<std::string>& labels) const;

  bool operator==(const SubsystemLayout& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  std::size_t dimension_ = 1;
};

class PureState {
 public:
  PureState(ComplexVector amplitudes, SubsystemLayout layout,
            const Tolerances& tol = kDefaultTolerances);

  static PureState basis(SubsystemLayout layout, std::size_t index);

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  const SubsystemLayout& layout() const noexcept { return layout_; }

 private:
  ComplexVector amplitudes_;
  SubsystemLayout layout_;
};

/// Unit-trace positive semidefinite Hermitian matrix with a layout.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix matrix, SubsystemLayout layout,
                const Tolerances& tol = kDefaultTolerances);
  DensityMatrix(const PureState& psi);  // NOLINT(google-explicit-constructor)

  static DensityMatrix maximally_mixed(SubsystemLayout layout);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const SubsystemLayout& layout() const noexcept { return layout_; }
  std::size_t dimension() const noexcept { return layout_.dimension(); }

  DensityMatrix with_labels(const std::vector<std::string>& labels) const;

 private:
  ComplexMatrix matrix_;
  SubsystemLayout layout_;
};

class HermitianOperator {
 public:
  HermitianOperator(ComplexMatrix matrix, SubsystemLayout layout,
                    const Tolerances& tol = kDefaultTolerances);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const SubsystemLayout& layout() const noexcept { return layout_; }

 private:
  ComplexMatrix matrix_;
  SubsystemLayout layout_;
};

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

bool all_finite(const ComplexMatrix& m) noexcept;
bool is_hermitian(const ComplexMatrix& m, double tol);
/// Smallest eigenvalue of the Hermitian part of `m`.
double min_eigenvalue(const ComplexMatrix& m);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                             std::size_t max_dimension = kDefaultTolerances.max_dimension);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);
PureState tensor_product(const PureState& a, const PureState& b);
HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b);

/// Partial trace of an arbitrary (possibly unnormalised) operator on `layout`.
ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemLayout& layout,
                            const std::vector<std::string>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

/// Lifts `op`, acting on `targets` (in the given order, first most
/// significant), to the whole of `layout` with identity elsewhere.
ComplexMatrix embed_operator(const ComplexMatrix& op, const SubsystemLayout& layout,
                             const std::vector<std::string>& targets);

/// exp(-i H t), computed from the eigendecomposition of H.
ComplexMatrix propagator(const HermitianOperator& h, double t);
DensityMatrix evolve(const DensityMatrix& rho, const HermitianOperator& h, double t);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double purity(const DensityMatrix& rho);
double expectation(const DensityMatrix& rho, const HermitianOperator& op);

}  // namespace locc
