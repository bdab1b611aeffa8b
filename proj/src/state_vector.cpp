#include "sqpbs/state_vector.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqpbs {
namespace {

constexpr double kUnitaryTolerance = 1e-10;
constexpr double kZeroProbability = 1e-14;

void check_qubit(const StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits()) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) + " out of range for " +
                            std::to_string(state.num_qubits()) + "-qubit state");
  }
}

void check_targets(const StateVector& state, std::span<const int> targets) {
  if (targets.empty()) throw std::invalid_argument("empty target list");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    check_qubit(state, targets[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw std::invalid_argument("duplicate target qubit");
    }
  }
}

// Maps sub-register index j (first target most significant) to the bit mask
// it occupies in the full register.
struct TargetLayout {
  std::vector<std::uint64_t> offsets;  // offsets[j] for j in [0, 2^k)
  std::uint64_t mask = 0;

  TargetLayout(int num_qubits, std::span<const int> targets) {
    const std::size_t k = targets.size();
    offsets.assign(std::size_t{1} << k, 0);
    for (std::size_t t = 0; t < k; ++t) {
      const std::uint64_t bit = std::uint64_t{1} << (num_qubits - 1 - targets[t]);
      mask |= bit;
      const std::size_t sub_bit = std::size_t{1} << (k - 1 - t);
      for (std::size_t j = 0; j < offsets.size(); ++j) {
        if (j & sub_bit) offsets[j] |= bit;
      }
    }
  }
};

Amplitudes apply_matrix(const StateVector& state, std::span<const int> targets, const Operator& matrix) {
  const TargetLayout layout(state.num_qubits(), targets);
  const auto& in = state.amplitudes();
  Amplitudes out = Amplitudes::Zero(in.size());
  const auto sub_dim = static_cast<Eigen::Index>(layout.offsets.size());
  Amplitudes gathered(sub_dim);
  for (std::uint64_t base = 0; base < state.dimension(); ++base) {
    if (base & layout.mask) continue;
    for (Eigen::Index j = 0; j < sub_dim; ++j) gathered[j] = in[static_cast<Eigen::Index>(base | layout.offsets[j])];
    const Amplitudes result = matrix * gathered;
    for (Eigen::Index j = 0; j < sub_dim; ++j) out[static_cast<Eigen::Index>(base | layout.offsets[j])] = result[j];
  }
  return out;
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= kZeroProbability) continue;
    last_nonzero = i;
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  // Rounding left u beyond the accumulated mass.
  return last_nonzero;
}

}  // namespace

StateVector::StateVector(int num_qubits, Amplitudes amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  if (num_qubits < 0 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("state vectors are limited to " + std::to_string(kMaxQubits) + " qubits");
  }
  if (amplitudes_.size() != (Eigen::Index{1} << num_qubits)) {
    throw std::invalid_argument("amplitude count does not match qubit count");
  }
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("state is not normalized");
  }
}

StateVector StateVector::basis(int num_qubits, std::uint64_t index) {
  if (num_qubits < 0 || num_qubits > kMaxQubits) throw std::invalid_argument("qubit count out of range");
  if (index >= (std::uint64_t{1} << num_qubits)) throw std::out_of_range("basis index out of range");
  Amplitudes amps = Amplitudes::Zero(Eigen::Index{1} << num_qubits);
  amps[static_cast<Eigen::Index>(index)] = 1.0;
  return {num_qubits, std::move(amps)};
}

namespace kets {
StateVector zero() { return StateVector::basis(1, 0); }
StateVector one() { return StateVector::basis(1, 1); }
StateVector plus() { return qubit(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2); }
StateVector minus() { return qubit(std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2); }

StateVector qubit(Complex a, Complex b) {
  Amplitudes amps(2);
  amps << a, b;
  return {1, std::move(amps)};
}

StateVector basis_state(Basis basis, int bit) {
  if (basis == Basis::Z) return bit ? one() : zero();
  return bit ? minus() : plus();
}
}  // namespace kets

StateVector tensor(const StateVector& a, const StateVector& b) {
  const int n = a.num_qubits() + b.num_qubits();
  if (n > StateVector::kMaxQubits) throw std::length_error("tensor product exceeds qubit limit");
  Amplitudes amps(static_cast<Eigen::Index>(a.dimension() * b.dimension()));
  const auto db = static_cast<Eigen::Index>(b.dimension());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(a.dimension()); ++i) {
    amps.segment(i * db, db) = a.amplitudes()[i] * b.amplitudes();
  }
  return {n, std::move(amps)};
}

bool is_unitary(const Operator& matrix, double tolerance) {
  if (matrix.rows() != matrix.cols()) return false;
  const Operator product = matrix.adjoint() * matrix;
  return (product - Operator::Identity(matrix.rows(), matrix.cols())).cwiseAbs().maxCoeff() <= tolerance;
}

StateVector apply_unitary(const StateVector& state, std::span<const int> targets, const Operator& matrix) {
  check_targets(state, targets);
  const auto dim = Eigen::Index{1} << targets.size();
  if (matrix.rows() != dim || matrix.cols() != dim) {
    throw std::invalid_argument("operator dimension does not match target count");
  }
  if (!is_unitary(matrix, kUnitaryTolerance)) throw std::invalid_argument("operator is not unitary");
  return {state.num_qubits(), apply_matrix(state, targets, matrix)};
}

StateVector apply_unitary(const StateVector& state, int target, const Operator& matrix) {
  const int targets[] = {target};
  return apply_unitary(state, targets, matrix);
}

Projection project(const StateVector& state, std::span<const int> targets, const StateVector& onto) {
  check_targets(state, targets);
  if (onto.dimension() != (std::size_t{1} << targets.size())) {
    throw std::invalid_argument("projection ket dimension does not match target count");
  }
  const Operator projector = onto.amplitudes() * onto.amplitudes().adjoint();
  Amplitudes projected = apply_matrix(state, targets, projector);
  const double probability = projected.squaredNorm();
  if (probability <= kZeroProbability) return {probability, std::nullopt};
  projected /= std::sqrt(probability);
  return {probability, StateVector(state.num_qubits(), std::move(projected))};
}

Projection project(const StateVector& state, int qubit, Basis basis, int bit) {
  const int targets[] = {qubit};
  return project(state, targets, kets::basis_state(basis, bit));
}

Projection project_bell(const StateVector& state, int qubit_a, int qubit_b, BellState outcome) {
  const int targets[] = {qubit_a, qubit_b};
  return project(state, targets, bell_ket(outcome));
}

std::array<double, 2> outcome_probabilities(const StateVector& state, int qubit, Basis basis) {
  return {project(state, qubit, basis, 0).probability, project(state, qubit, basis, 1).probability};
}

Measurement measure(const StateVector& state, int qubit, Basis basis, Rng& rng) {
  check_qubit(state, qubit);
  const Projection outcomes[] = {project(state, qubit, basis, 0), project(state, qubit, basis, 1)};
  const double probabilities[] = {outcomes[0].probability, outcomes[1].probability};
  const auto bit = sample_index(probabilities, rng);
  return {static_cast<int>(bit), *outcomes[bit].state};
}

const char* to_string(BellState state) {
  switch (state) {
    case BellState::PhiPlus: return "phi+";
    case BellState::PhiMinus: return "phi-";
    case BellState::PsiPlus: return "psi+";
    case BellState::PsiMinus: return "psi-";
  }
  return "?";
}

StateVector bell_ket(BellState state) {
  const double r = std::numbers::sqrt2 / 2;
  Amplitudes amps = Amplitudes::Zero(4);
  switch (state) {
    case BellState::PhiPlus: amps << r, 0, 0, r; break;
    case BellState::PhiMinus: amps << r, 0, 0, -r; break;
    case BellState::PsiPlus: amps << 0, r, r, 0; break;
    case BellState::PsiMinus: amps << 0, r, -r, 0; break;
  }
  return {2, std::move(amps)};
}

BellMeasurement measure_bell(const StateVector& state, int qubit_a, int qubit_b, Rng& rng) {
  std::array<Projection, 4> outcomes{
      project_bell(state, qubit_a, qubit_b, BellState::PhiPlus),
      project_bell(state, qubit_a, qubit_b, BellState::PhiMinus),
      project_bell(state, qubit_a, qubit_b, BellState::PsiPlus),
      project_bell(state, qubit_a, qubit_b, BellState::PsiMinus),
  };
  std::array<double, 4> probabilities{};
  for (std::size_t i = 0; i < 4; ++i) probabilities[i] = outcomes[i].probability;
  const auto index = sample_index(probabilities, rng);
  return {{static_cast<BellState>(index)}, *outcomes[index].state};
}

double fidelity_up_to_phase(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("fidelity: dimension mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double qubit_fidelity(const StateVector& state, int qubit, const StateVector& target) {
  if (target.num_qubits() != 1) throw std::invalid_argument("qubit_fidelity: target must be one qubit");
  const int targets[] = {qubit};
  return project(state, targets, target).probability;
}

std::optional<StateVector> factor_out_qubit(const StateVector& state, int qubit) {
  check_qubit(state, qubit);
  const std::uint64_t bit = std::uint64_t{1} << (state.num_qubits() - 1 - qubit);
  std::uint64_t best = 0;
  double best_weight = -1.0;
  for (std::uint64_t i = 0; i < state.dimension(); ++i) {
    const double w = std::norm(state[i]);
    if (w > best_weight) {
      best_weight = w;
      best = i;
    }
  }
  const std::uint64_t rest = best & ~bit;
  Complex a = state[rest];
  Complex b = state[rest | bit];
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  // Remove the phase carried by the rest of the register.
  const Complex phase = std::abs(a) > std::abs(b) ? a / std::abs(a) : b / std::abs(b);
  a /= norm * phase;
  b /= norm * phase;
  StateVector candidate = kets::qubit(a, b);
  if (qubit_fidelity(state, qubit, candidate) < 1.0 - 1e-9) return std::nullopt;
  return candidate;
}

Operator reduced_density_matrix(const StateVector& state, std::span<const int> qubits) {
  check_targets(state, qubits);
  const TargetLayout layout(state.num_qubits(), qubits);
  const auto dim = static_cast<Eigen::Index>(layout.offsets.size());
  Operator rho = Operator::Zero(dim, dim);
  for (std::uint64_t base = 0; base < state.dimension(); ++base) {
    if (base & layout.mask) continue;
    Amplitudes slice(dim);
    for (Eigen::Index j = 0; j < dim; ++j) slice[j] = state[base | layout.offsets[j]];
    rho += slice * slice.adjoint();
  }
  return rho;
}

double trace_distance(const Operator& rho, const Operator& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  const Eigen::SelfAdjointEigenSolver<Operator> solver(rho - sigma, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

namespace gates {
Operator identity() { return Operator::Identity(2, 2); }

Operator pauli_x() {
  Operator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Operator i_pauli_y() {
  Operator m(2, 2);
  m << 0, 1, -1, 0;
  return m;
}

Operator pauli_z() {
  Operator m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Operator hadamard() {
  const double r = std::numbers::sqrt2 / 2;
  Operator m(2, 2);
  m << r, r, r, -r;
  return m;
}
}  // namespace gates

}  // namespace sqpbs
