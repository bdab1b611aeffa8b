#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sqpbs/rng.hpp"
#include "sqpbs/state_vector.hpp"

namespace sqpbs {

/// a|0> + b|1> with |a|^2 + |b|^2 = 1.
struct MessageQubit {
  Complex a;
  Complex b;

  /// Throws std::invalid_argument unless |a|^2 + |b|^2 = 1 within 1e-12.
  static MessageQubit make(Complex a, Complex b);
};

enum class Pauli { I, SigmaX, ISigmaY, SigmaZ };

const char* to_string(Pauli pauli);
Operator matrix_of(Pauli pauli);

/// Measurement record of one teleportation round.
struct TeleportOutcomes {
  int z1;              // particle 1, Z basis
  BellOutcome bell_m2; // particles (m, 2)
  int z4;              // particle 4, Z basis

  /// 0..15, ordered (z1, bell, z4) lexicographically.
  int index() const { return (z1 << 3) | (static_cast<int>(bell_m2.variant) << 1) | z4; }
  static TeleportOutcomes from_index(int index);
  static std::array<TeleportOutcomes, 16> all();

  std::string describe() const;

  friend bool operator==(const TeleportOutcomes&, const TeleportOutcomes&) = default;
};

/// Register layout of one carrier instance: message qubit m then particles 1-4.
namespace chi_qubit {
constexpr int kMessage = 0;
constexpr int kParticle1 = 1;  // Assistant 1 / Bob
constexpr int kParticle2 = 2;  // Sender / David
constexpr int kParticle3 = 3;  // Receiver / Trent
constexpr int kParticle4 = 4;  // Assistant 2 / Charlie
constexpr int kCount = 5;
}  // namespace chi_qubit

enum class ChiRole { Sender, Assistant1, Assistant2, Receiver };

/// Which register qubit a teleportation role holds.
int qubit_for_role(ChiRole role);

/// |chi00>_{1234}: +1/(2 sqrt 2) on 0000 0011 0110 1001 1010 1100, -1/(2 sqrt 2) on 0101 1111.
StateVector prepare_chi();

StateVector prepare_message(const MessageQubit& m);

/// |xi>_m (x) |chi00>_{1234}, laid out per chi_qubit.
StateVector prepare_teleport_register(const MessageQubit& m);

/// Receiver's correction for a measurement record.
Pauli correction_for(const TeleportOutcomes& outcomes);

/// Particle-3 state (before correction) listed for a measurement record.
StateVector collapsed_state_for(const TeleportOutcomes& outcomes, const MessageQubit& m);

struct TeleportRun {
  TeleportOutcomes outcomes;
  StateVector recovered;
};

/// Z on particle 1, Bell on (m, 2), Z on particle 4, then the correction on particle 3.
TeleportRun run_teleportation(const MessageQubit& m, Rng& rng);

using CorrectionLookup = std::function<Pauli(const TeleportOutcomes&)>;

struct BranchReport {
  TeleportOutcomes outcomes;
  double probability = 0.0;
  double collapsed_fidelity = 0.0;  // projected particle 3 vs collapsed_state_for
  double recovered_fidelity = 0.0;  // after correction vs |xi>
  Complex recovered_phase;          // global phase of the corrected particle, fixed by the outcome kets
  std::vector<Pauli> recovering_paulis;  // every Pauli reaching fidelity 1
  bool order_independent = false;        // reverse measurement order gives the same particle 3
  bool passed = false;
};

struct Table1Report {
  MessageQubit message;
  std::array<BranchReport, 16> branches;
  bool passed = true;
  std::string failure;  // first offending branch, empty on success
};

/// Forces every outcome branch by projection of the full register and checks
/// the lookup against it. Tolerance 1e-10 on fidelities.
Table1Report oracle_verify_table1(const MessageQubit& m, const CorrectionLookup& lookup = correction_for);

}  // namespace sqpbs
