#pragma once

// Random generators and independent reference computations for tests. The
// oracles here deliberately avoid the library's kernels: they use explicit
// index loops, truncated Taylor series and full-space projectors.

#include <cmath>
#include <complex>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "locc/instruments.hpp"
#include "locc/linalg.hpp"
#include "locc/worlds.hpp"

namespace locc::test {

inline ComplexMatrix random_ginibre(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = Complex(n(rng), n(rng));
  }
  return g;
}

inline DensityMatrix random_density(std::mt19937_64& rng, const SubsystemLayout& layout) {
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  std::uniform_int_distribution<Eigen::Index> rank(1, d);
  const ComplexMatrix g = random_ginibre(rng, d, rank(rng));
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(rho, layout);
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index d) {
  const ComplexMatrix g = random_ginibre(rng, d, d);
  return 0.5 * (g + g.adjoint());
}

inline SubsystemLayout qubit_layout(const std::string& prefix, std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return SubsystemLayout::qubits(labels);
}

// --- oracles ---------------------------------------------------------------

/// Kronecker product by explicit loops.
inline ComplexMatrix naive_kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline std::vector<std::size_t> digits_of(std::size_t index, const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> d(dims.size());
  for (std::size_t f = dims.size(); f-- > 0;) {
    d[f] = index % dims[f];
    index /= dims[f];
  }
  return d;
}

inline std::size_t index_of_digits(const std::vector<std::size_t>& digits,
                                   const std::vector<std::size_t>& dims) {
  std::size_t i = 0;
  for (std::size_t f = 0; f < dims.size(); ++f) i = i * dims[f] + digits[f];
  return i;
}

/// Partial trace by summing matrix elements whose traced digits agree.
inline ComplexMatrix brute_partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                                         const std::vector<bool>& keep) {
  std::vector<std::size_t> kept_dims;
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (keep[f]) kept_dims.push_back(dims[f]);
  std::size_t kd = 1;
  for (auto d : kept_dims) kd *= d;
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(kd), static_cast<Eigen::Index>(kd));
  const auto n = static_cast<std::size_t>(m.rows());
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = digits_of(i, dims);
    for (std::size_t j = 0; j < n; ++j) {
      const auto dj = digits_of(j, dims);
      bool same_traced = true;
      std::vector<std::size_t> ki, kj;
      for (std::size_t f = 0; f < dims.size(); ++f) {
        if (keep[f]) {
          ki.push_back(di[f]);
          kj.push_back(dj[f]);
        } else if (di[f] != dj[f]) {
          same_traced = false;
        }
      }
      if (!same_traced) continue;
      out(static_cast<Eigen::Index>(index_of_digits(ki, kept_dims)),
          static_cast<Eigen::Index>(index_of_digits(kj, kept_dims))) +=
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

/// exp(-i H t) by scaling and squaring a 40-term Taylor series.
inline ComplexMatrix taylor_propagator(const ComplexMatrix& h, double t) {
  const ComplexMatrix a = Complex(0.0, -t) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::ldexp(1.0, squarings) > 0.25) ++squarings;
  const ComplexMatrix scaled = a / std::ldexp(1.0, squarings);
  ComplexMatrix sum = ComplexMatrix::Identity(h.rows(), h.cols());
  ComplexMatrix term = sum;
  for (int k = 1; k <= 40; ++k) {
    term = (term * scaled / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

/// Pauli Z eigenvalue of qubit `q` (0 = most significant) in basis index x.
inline int z_value(std::size_t x, std::size_t q, std::size_t n_qubits) {
  return ((x >> (n_qubits - 1 - q)) & 1u) ? -1 : +1;
}

/// Environment state of an EPR world after evolution, computed from scratch:
/// initial amplitudes and the coupling diagonal are built by index loops, the
/// propagator by Taylor series. Only the seeded H_Q̄ is taken from the world.
inline ComplexVector oracle_environment_state(const World& world) {
  const std::size_t nq = world.q_dim(), nb = world.qbar_dim(), n = nq + nb;
  const std::size_t dim = std::size_t{1} << n;

  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  const double amp_qbar = std::pow(2.0, -0.5 * static_cast<double>(nb));
  for (std::size_t x = 0; x < dim; ++x) {
    // Q0 Q1 in (|01> - |10>)/sqrt2, remaining Q in |0>, Q̄ uniform.
    const std::size_t q01 = x >> (n - 2);
    bool rest_zero = true;
    for (std::size_t i = 2; i < nq; ++i) rest_zero = rest_zero && z_value(x, i, n) == 1;
    if (!rest_zero) continue;
    if (q01 == 1) psi(static_cast<Eigen::Index>(x)) = amp_qbar / std::sqrt(2.0);
    if (q01 == 2) psi(static_cast<Eigen::Index>(x)) = -amp_qbar / std::sqrt(2.0);
  }

  ComplexMatrix h = naive_kron(ComplexMatrix::Identity(std::int64_t{1} << nq, std::int64_t{1} << nq),
                               world.decomposition().h_qbar.matrix());
  const double lambda = world.lambda();
  for (std::size_t x = 0; x < dim; ++x) {
    double diag = 0.0;
    for (std::size_t i = 0; i < nq; ++i) {
      if (i == 1) continue;
      for (std::size_t j = 0; j < nb; ++j) diag += z_value(x, i, n) * z_value(x, nq + j, n);
    }
    h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += lambda * diag;
  }
  return taylor_propagator(h, world.evolution_time()) * psi;
}

/// Reduced state of the two leading qubits by summing over the rest.
inline ComplexMatrix oracle_pair_from_environment(const ComplexVector& psi) {
  const std::size_t rest = static_cast<std::size_t>(psi.size()) / 4;
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t r = 0; r < rest; ++r)
        rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            psi(static_cast<Eigen::Index>(a * rest + r)) *
            std::conj(psi(static_cast<Eigen::Index>(b * rest + r)));
  return rho;
}

/// Projector onto the +1 (o = 0) or -1 (o = 1) eigenvector of cos(t) Z + sin(t) X.
inline ComplexMatrix oracle_projector(double angle, int o) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  ComplexVector v(2);
  if (o == 0) {
    v << c, s;
  } else {
    v << -s, c;
  }
  return v * v.adjoint();
}

/// CHSH transcript distribution ("<sa><oa><sb><ob>") from joint projectors on
/// the whole environment, with no reduction to the pair.
inline std::map<std::string, double> oracle_chsh_distribution(const ComplexVector& psi_env,
                                                              const std::array<double, 2>& alice,
                                                              const std::array<double, 2>& bob) {
  const auto dim = psi_env.size();
  const auto rest = dim / 4;
  std::map<std::string, double> out;
  for (int sa = 0; sa < 2; ++sa)
    for (int oa = 0; oa < 2; ++oa)
      for (int sb = 0; sb < 2; ++sb)
        for (int ob = 0; ob < 2; ++ob) {
          const ComplexMatrix local =
              naive_kron(oracle_projector(alice[sa], oa), oracle_projector(bob[sb], ob));
          const ComplexMatrix full = naive_kron(local, ComplexMatrix::Identity(rest, rest));
          const double p = 0.25 * (psi_env.adjoint() * full * psi_env)(0, 0).real();
          out[std::to_string(sa) + std::to_string(oa) + std::to_string(sb) + std::to_string(ob)] = p;
        }
  return out;
}

}  // namespace locc::test

namespace locc::test {

/// Random valid instrument: a Haar-like isometry from C^d into C^(k d) cut
/// into k Kraus operators, dealt round-robin into `outcomes` branches.
inline QuantumInstrument random_instrument(std::mt19937_64& rng, Eigen::Index d, std::size_t outcomes,
                                           std::size_t kraus_count) {
  const ComplexMatrix g = random_ginibre(rng, static_cast<Eigen::Index>(kraus_count) * d, d);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g.adjoint() * g);
  const ComplexMatrix inv_sqrt = es.eigenvectors() *
                                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                 es.eigenvectors().adjoint();
  const ComplexMatrix v = g * inv_sqrt;
  std::vector<Branch> branches(outcomes);
  for (std::size_t j = 0; j < outcomes; ++j) branches[j].outcome = "o" + std::to_string(j);
  for (std::size_t k = 0; k < kraus_count; ++k) {
    branches[k % outcomes].kraus.push_back(v.block(static_cast<Eigen::Index>(k) * d, 0, d, d));
  }
  return QuantumInstrument(std::move(branches));
}

/// Smallest eigenvalue of the Choi matrix computed from the weighted Gram
/// matrix of the Kraus operators, G^(1/2) W G^(1/2); its nonzero spectrum
/// coincides with the Choi matrix's.
inline double kraus_gram_min_eigenvalue(const Branch& b) {
  const auto n = static_cast<Eigen::Index>(b.kraus.size());
  ComplexMatrix gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      gram(i, j) = (b.kraus[static_cast<std::size_t>(i)].adjoint() * b.kraus[static_cast<std::size_t>(j)])
                       .trace();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
  const ComplexMatrix root = es.eigenvectors() *
                             es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                             es.eigenvectors().adjoint();
  ComplexMatrix w = ComplexMatrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n && !b.weights.empty(); ++i) w(i, i) = b.weights[static_cast<std::size_t>(i)];
  const ComplexMatrix m = root * w * root;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> em(0.5 * (m + m.adjoint()));
  return em.eigenvalues().minCoeff();
}

}  // namespace locc::test
