#include "locc/worlds.hpp"

#include <cmath>

#include <fmt/format.h>

#include "locc/errors.hpp"
#include "locc/rng.hpp"

namespace locc {

namespace {

// Seeds H_Q̄ draws; distinct from the trial streams used for sampling.
constexpr std::uint64_t kHamiltonianStream = 0x48616d696c746f6eULL;

ComplexMatrix random_single_qubit_hermitian(CounterStream& rng) {
  auto draw = [&] { return 2.0 * rng.next_uniform() - 1.0; };
  const double d0 = draw(), d1 = draw(), re = draw(), im = draw();
  ComplexMatrix h(2, 2);
  h << d0, Complex(re, -im), Complex(re, im), d1;
  return h;
}

}  // namespace

HermitianOperator HamiltonianDecomposition::total() const {
  const auto& q = h_q.layout();
  const auto& qbar = h_qbar.layout();
  const auto dq = static_cast<Eigen::Index>(q.dimension());
  const auto dqbar = static_cast<Eigen::Index>(qbar.dimension());
  ComplexMatrix h = tensor_product(h_q.matrix(), ComplexMatrix::Identity(dqbar, dqbar)) +
                    tensor_product(ComplexMatrix::Identity(dq, dq), h_qbar.matrix());
  if (lambda != 0.0) h += lambda * h_coupling.matrix();
  return HermitianOperator(std::move(h), q.concat(qbar));
}

const HamiltonianDecomposition& World::decomposition() const {
  if (!decomposition_) throw ArgumentError("ER world has no environment Hamiltonian");
  return *decomposition_;
}

SubsystemLayout World::full_layout() const {
  std::vector<std::string> labels{pair_labels()[0], pair_labels()[1]};
  if (mode_ == WorldMode::kEPR) {
    for (auto& l : q_labels(q_dim_)) labels.push_back(std::move(l));
    for (auto& l : qbar_labels(qbar_dim_)) labels.push_back(std::move(l));
  }
  return SubsystemLayout::qubits(labels);
}

SubsystemLayout World::environment_layout() const {
  if (mode_ != WorldMode::kEPR) throw ArgumentError("ER world has no environment");
  auto labels = q_labels(q_dim_);
  for (auto& l : qbar_labels(qbar_dim_)) labels.push_back(std::move(l));
  return SubsystemLayout::qubits(labels);
}

std::string World::identifier() const {
  if (mode_ == WorldMode::kER) return "ER";
  return fmt::format("EPR(q_dim={},qbar_dim={},lambda={:.17g},seed={},t={:.17g})", q_dim_, qbar_dim_,
                     lambda(), seed_, evolution_time_);
}

World World::with_locations(LocationLabels labels) const {
  World w = *this;
  w.locations_ = std::move(labels);
  return w;
}

std::vector<std::string> pair_labels() { return {"q_A", "q_B"}; }

std::vector<std::string> q_labels(std::size_t q_dim) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < q_dim; ++i) out.push_back(fmt::format("Q{}", i));
  return out;
}

std::vector<std::string> qbar_labels(std::size_t qbar_dim) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < qbar_dim; ++i) out.push_back(fmt::format("Qb{}", i));
  return out;
}

DensityMatrix singlet() {
  ComplexVector psi = ComplexVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return DensityMatrix(PureState(std::move(psi), SubsystemLayout::qubits(pair_labels())));
}

World build_er_world(LocationLabels locations) {
  World w;
  w.mode_ = WorldMode::kER;
  w.locations_ = std::move(locations);
  return w;
}

World build_epr_world(std::size_t q_dim, std::size_t qbar_dim, double lambda, std::uint64_t seed,
                      double evolution_time, LocationLabels locations) {
  if (q_dim < 2) throw ArgumentError(fmt::format("q_dim = {} < 2", q_dim));
  if (qbar_dim < 1) throw ArgumentError(fmt::format("qbar_dim = {} < 1", qbar_dim));
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError(fmt::format("lambda = {} must be finite and >= 0", lambda));
  }
  if (!(evolution_time > 0.0) || !std::isfinite(evolution_time)) {
    throw ArgumentError(fmt::format("evolution_time = {} must be finite and > 0", evolution_time));
  }

  World w;
  w.mode_ = WorldMode::kEPR;
  w.q_dim_ = q_dim;
  w.qbar_dim_ = qbar_dim;
  w.seed_ = seed;
  w.evolution_time_ = evolution_time;
  w.locations_ = std::move(locations);
  // Capacity check on boundary pair + environment before any allocation.
  (void)w.full_layout();

  const auto q_layout = SubsystemLayout::qubits(q_labels(q_dim));
  const auto qbar_layout = SubsystemLayout::qubits(qbar_labels(qbar_dim));
  const auto env = q_layout.concat(qbar_layout);
  const auto dq = static_cast<Eigen::Index>(q_layout.dimension());
  const auto dqbar = static_cast<Eigen::Index>(qbar_layout.dimension());
  const auto denv = static_cast<Eigen::Index>(env.dimension());

  ComplexMatrix h_qbar = ComplexMatrix::Zero(dqbar, dqbar);
  CounterStream rng(seed, kHamiltonianStream);
  for (const auto& label : qbar_layout.labels()) {
    h_qbar += embed_operator(random_single_qubit_hermitian(rng), qbar_layout, {label});
  }

  ComplexMatrix coupling = ComplexMatrix::Zero(denv, denv);
  for (std::size_t i = 0; i < q_dim; ++i) {
    if (i == 1) continue;  // Bob's carrier
    for (std::size_t j = 0; j < qbar_dim; ++j) {
      const std::vector<std::string> targets{fmt::format("Q{}", i), fmt::format("Qb{}", j)};
      coupling += embed_operator(tensor_product(pauli::z(), pauli::z()), env, targets);
    }
  }

  w.decomposition_ = HamiltonianDecomposition{
      HermitianOperator(ComplexMatrix::Zero(dq, dq), q_layout),
      HermitianOperator(std::move(h_qbar), qbar_layout),
      HermitianOperator(std::move(coupling), env),
      lambda,
  };
  return w;
}

BoundaryPair deliver_pair(const World& world) {
  if (world.mode() == WorldMode::kER) return {singlet(), world.identifier()};

  const auto env = world.environment_layout();
  // singlet(Q0,Q1) (x) |0..0> on the rest of Q (x) |+..+> on Q̄.
  ComplexVector pair = ComplexVector::Zero(4);
  pair(1) = 1.0 / std::sqrt(2.0);
  pair(2) = -1.0 / std::sqrt(2.0);
  ComplexVector psi = pair;
  for (std::size_t i = 2; i < world.q_dim(); ++i) {
    ComplexVector zero = ComplexVector::Zero(2);
    zero(0) = 1.0;
    psi = tensor_product(psi, zero);
  }
  ComplexVector plus = ComplexVector::Constant(2, 1.0 / std::sqrt(2.0));
  for (std::size_t j = 0; j < world.qbar_dim(); ++j) psi = tensor_product(psi, plus);

  const ComplexVector evolved =
      propagator(world.decomposition().total(), world.evolution_time()) * psi;

  // Q0, Q1 are the leading factors: reshape to 4 x rest and form M M^dagger.
  const auto rest = static_cast<Eigen::Index>(env.dimension() / 4);
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      evolved.data(), 4, rest);
  ComplexMatrix reduced = m * m.adjoint();
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  reduced /= reduced.trace().real();

  return {DensityMatrix(std::move(reduced), SubsystemLayout::qubits(pair_labels())),
          world.identifier()};
}

std::vector<PurityPoint> channel_purity_profile(const std::vector<double>& lambda_grid,
                                                std::size_t q_dim, std::size_t qbar_dim,
                                                std::uint64_t seed, double evolution_time) {
  if (lambda_grid.empty()) throw ArgumentError("lambda grid is empty");
  for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1])) throw ArgumentError("lambda grid is not ascending");
  }
  std::vector<PurityPoint> out;
  out.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    const auto pair = deliver_pair(build_epr_world(q_dim, qbar_dim, lambda, seed, evolution_time));
    out.push_back({lambda, purity(pair.state)});
  }
  return out;
}

}  // namespace locc
