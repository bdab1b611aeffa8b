#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sqpbs/rng.hpp"

namespace sqpbs {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Amplitudes = Eigen::VectorXcd;

/// Dense pure state over at most kMaxQubits qubits.
///
/// Bit convention: qubit q lives at bit position (num_qubits - 1 - q) of the
/// basis-state index, i.e. qubit 0 is the most significant bit. basis(4, 5)
/// is |0101>. Multi-qubit operators follow the same order: the first listed
/// target is the most significant bit of the operator's row index.
///
/// Values are immutable; every operation returns a new state.
class StateVector {
 public:
  static constexpr int kMaxQubits = 8;
  static constexpr double kNormTolerance = 1e-10;

  StateVector(int num_qubits, Amplitudes amplitudes);

  static StateVector basis(int num_qubits, std::uint64_t index);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t index) const { return amplitudes_[static_cast<Eigen::Index>(index)]; }

  double norm_squared() const { return amplitudes_.squaredNorm(); }

 private:
  int num_qubits_;
  Amplitudes amplitudes_;
};

enum class Basis { Z, X };

/// Single-qubit kets used throughout.
namespace kets {
StateVector zero();
StateVector one();
StateVector plus();
StateVector minus();
/// a|0> + b|1>; throws if not normalized.
StateVector qubit(Complex a, Complex b);
/// Eigenstate of `basis` with eigen-bit `bit` (Z: |0>,|1>; X: |+>,|->).
StateVector basis_state(Basis basis, int bit);
}  // namespace kets

StateVector tensor(const StateVector& a, const StateVector& b);

/// Applies `matrix` to `targets` (identity elsewhere). The matrix must be
/// unitary within 1e-10 and of dimension 2^targets.size().
StateVector apply_unitary(const StateVector& state, std::span<const int> targets, const Operator& matrix);
StateVector apply_unitary(const StateVector& state, int target, const Operator& matrix);

bool is_unitary(const Operator& matrix, double tolerance = 1e-10);

struct Measurement {
  int bit;
  StateVector state;
};

/// Projective single-qubit measurement. In basis X, bit 0 is |+> and bit 1 is |->.
Measurement measure(const StateVector& state, int qubit, Basis basis, Rng& rng);

enum class BellState { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

/// Classical encoding of a Bell outcome: phi+ 00, phi- 01, psi+ 10, psi- 11.
struct BellOutcome {
  BellState variant;

  int high_bit() const { return static_cast<int>(variant) >> 1; }
  int low_bit() const { return static_cast<int>(variant) & 1; }
  static BellOutcome from_bits(int high, int low) { return {static_cast<BellState>((high << 1) | low)}; }

  friend bool operator==(BellOutcome, BellOutcome) = default;
};

const char* to_string(BellState state);

/// Two-qubit Bell ket, ordered (first, second).
StateVector bell_ket(BellState state);

struct BellMeasurement {
  BellOutcome outcome;
  StateVector state;
};

BellMeasurement measure_bell(const StateVector& state, int qubit_a, int qubit_b, Rng& rng);

/// Result of projecting onto one outcome without sampling.
struct Projection {
  double probability;
  std::optional<StateVector> state;  // empty when probability is ~0
};

/// Projects `targets` onto the pure ket `onto` (dimension 2^targets.size()).
/// The projected state keeps every qubit; the targets are left in `onto`.
Projection project(const StateVector& state, std::span<const int> targets, const StateVector& onto);
Projection project(const StateVector& state, int qubit, Basis basis, int bit);
Projection project_bell(const StateVector& state, int qubit_a, int qubit_b, BellState outcome);

/// Outcome probabilities for a single-qubit measurement: {P(bit 0), P(bit 1)}.
std::array<double, 2> outcome_probabilities(const StateVector& state, int qubit, Basis basis);

/// |<a|b>|^2; insensitive to global phase.
double fidelity_up_to_phase(const StateVector& a, const StateVector& b);

/// <target|rho_q|target>, where rho_q is the reduced state of `qubit`.
/// Equals fidelity_up_to_phase when the qubit is unentangled.
double qubit_fidelity(const StateVector& state, int qubit, const StateVector& target);

/// Extracts the state of `qubit` when it is in a product with the rest of
/// the register. Returns empty if the qubit is entangled (beyond 1e-9).
std::optional<StateVector> factor_out_qubit(const StateVector& state, int qubit);

/// Reduced density matrix over `qubits` (in the listed order).
Operator reduced_density_matrix(const StateVector& state, std::span<const int> qubits);

/// 0.5 * || rho - sigma ||_1 for Hermitian operands.
double trace_distance(const Operator& rho, const Operator& sigma);

/// Paulis and friends.
namespace gates {
Operator identity();
Operator pauli_x();
Operator i_pauli_y();  // |0><1| - |1><0|
Operator pauli_z();
Operator hadamard();
}  // namespace gates

}  // namespace sqpbs
