#include "sqpbs/chi_teleport.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sqpbs {
namespace {

constexpr double kFidelityTolerance = 1e-10;

// One correction-table row: particle 3 collapses to
// a_sign * a |a_on> + b_sign * b |1 - a_on>, and `fix` recovers |xi>.
struct TableRow {
  int a_on;
  int a_sign;
  int b_sign;
  Pauli fix;
};

// Indexed by TeleportOutcomes::index(): (z1, bell, z4) with bell ordered phi+, phi-, psi+, psi-.
constexpr std::array<TableRow, 16> kTable = {{
    {0, +1, +1, Pauli::I},        // 0 phi+ 0
    {1, +1, -1, Pauli::ISigmaY},  // 0 phi+ 1
    {0, +1, -1, Pauli::SigmaZ},   // 0 phi- 0
    {1, +1, +1, Pauli::SigmaX},   // 0 phi- 1
    {1, +1, +1, Pauli::SigmaX},   // 0 psi+ 0
    {0, -1, +1, Pauli::SigmaZ},   // 0 psi+ 1
    {1, +1, -1, Pauli::ISigmaY},  // 0 psi- 0
    {0, -1, -1, Pauli::I},        // 0 psi- 1
    {1, +1, +1, Pauli::SigmaX},   // 1 phi+ 0
    {0, +1, -1, Pauli::SigmaZ},   // 1 phi+ 1
    {1, +1, -1, Pauli::ISigmaY},  // 1 phi- 0
    {0, +1, +1, Pauli::I},        // 1 phi- 1
    {0, +1, +1, Pauli::I},        // 1 psi+ 0
    {1, -1, +1, Pauli::ISigmaY},  // 1 psi+ 1
    {0, +1, -1, Pauli::SigmaZ},   // 1 psi- 0
    {1, -1, -1, Pauli::SigmaX},   // 1 psi- 1
}};

constexpr std::array<Pauli, 4> kAllPaulis = {Pauli::I, Pauli::SigmaX, Pauli::ISigmaY, Pauli::SigmaZ};

// Projects the full register onto a measurement record, in the given order.
std::optional<StateVector> force_branch(const StateVector& reg, const TeleportOutcomes& o, bool reverse,
                                        double* probability) {
  auto step_z1 = [&](const StateVector& s) { return project(s, chi_qubit::kParticle1, Basis::Z, o.z1); };
  auto step_bell = [&](const StateVector& s) {
    return project_bell(s, chi_qubit::kMessage, chi_qubit::kParticle2, o.bell_m2.variant);
  };
  auto step_z4 = [&](const StateVector& s) { return project(s, chi_qubit::kParticle4, Basis::Z, o.z4); };

  double p = 1.0;
  std::optional<StateVector> current = reg;
  auto run = [&](auto&& step) {
    if (!current) return;
    Projection proj = step(*current);
    p *= proj.probability;
    current = std::move(proj.state);
  };
  if (reverse) {
    run(step_z4);
    run(step_bell);
    run(step_z1);
  } else {
    run(step_z1);
    run(step_bell);
    run(step_z4);
  }
  if (probability) *probability = p;
  return current;
}


// Particle 3 with the phase fixed by contracting the outcome kets <z1|<bell|<z4|
// against the register. Returns the normalized (a, b).
std::array<Complex, 2> contract_particle3(const StateVector& reg, const TeleportOutcomes& o) {
  const StateVector bell = bell_ket(o.bell_m2.variant);
  std::array<Complex, 2> out{};
  for (int p3 = 0; p3 < 2; ++p3) {
    for (int m = 0; m < 2; ++m) {
      for (int p2 = 0; p2 < 2; ++p2) {
        const std::size_t index = static_cast<std::size_t>((m << 4) | (o.z1 << 3) | (p2 << 2) | (p3 << 1) | o.z4);
        out[static_cast<std::size_t>(p3)] += std::conj(bell[static_cast<std::size_t>((m << 1) | p2)]) * reg[index];
      }
    }
  }
  const double norm = std::sqrt(std::norm(out[0]) + std::norm(out[1]));
  out[0] /= norm;
  out[1] /= norm;
  return out;
}

}  // namespace

MessageQubit MessageQubit::make(Complex a, Complex b) {
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12) {
    throw std::invalid_argument("message qubit violates |a|^2 + |b|^2 = 1");
  }
  return {a, b};
}

const char* to_string(Pauli pauli) {
  switch (pauli) {
    case Pauli::I: return "I";
    case Pauli::SigmaX: return "sigma_x";
    case Pauli::ISigmaY: return "i*sigma_y";
    case Pauli::SigmaZ: return "sigma_z";
  }
  return "?";
}

Operator matrix_of(Pauli pauli) {
  switch (pauli) {
    case Pauli::I: return gates::identity();
    case Pauli::SigmaX: return gates::pauli_x();
    case Pauli::ISigmaY: return gates::i_pauli_y();
    case Pauli::SigmaZ: return gates::pauli_z();
  }
  throw std::logic_error("unknown Pauli");
}

TeleportOutcomes TeleportOutcomes::from_index(int index) {
  if (index < 0 || index >= 16) throw std::out_of_range("teleport outcome index out of range");
  return {(index >> 3) & 1, {static_cast<BellState>((index >> 1) & 3)}, index & 1};
}

std::array<TeleportOutcomes, 16> TeleportOutcomes::all() {
  std::array<TeleportOutcomes, 16> out{};
  for (int i = 0; i < 16; ++i) out[static_cast<std::size_t>(i)] = from_index(i);
  return out;
}

std::string TeleportOutcomes::describe() const {
  std::ostringstream os;
  os << "(z1=" << z1 << ", bell=" << to_string(bell_m2.variant) << ", z4=" << z4 << ")";
  return os.str();
}

int qubit_for_role(ChiRole role) {
  switch (role) {
    case ChiRole::Sender: return chi_qubit::kParticle2;
    case ChiRole::Assistant1: return chi_qubit::kParticle1;
    case ChiRole::Assistant2: return chi_qubit::kParticle4;
    case ChiRole::Receiver: return chi_qubit::kParticle3;
  }
  throw std::logic_error("unknown role");
}

StateVector prepare_chi() {
  const double c = 1.0 / (2.0 * std::numbers::sqrt2);
  Amplitudes amps = Amplitudes::Zero(16);
  for (int index : {0b0000, 0b0011, 0b0110, 0b1001, 0b1010, 0b1100}) amps[index] = c;
  for (int index : {0b0101, 0b1111}) amps[index] = -c;
  return {4, std::move(amps)};
}

StateVector prepare_message(const MessageQubit& m) {
  const MessageQubit checked = MessageQubit::make(m.a, m.b);
  return kets::qubit(checked.a, checked.b);
}

StateVector prepare_teleport_register(const MessageQubit& m) { return tensor(prepare_message(m), prepare_chi()); }

Pauli correction_for(const TeleportOutcomes& outcomes) {
  return kTable[static_cast<std::size_t>(outcomes.index())].fix;
}

StateVector collapsed_state_for(const TeleportOutcomes& outcomes, const MessageQubit& m) {
  const TableRow& row = kTable[static_cast<std::size_t>(outcomes.index())];
  const Complex on_a = static_cast<double>(row.a_sign) * m.a;
  const Complex on_b = static_cast<double>(row.b_sign) * m.b;
  return row.a_on == 0 ? kets::qubit(on_a, on_b) : kets::qubit(on_b, on_a);
}

TeleportRun run_teleportation(const MessageQubit& m, Rng& rng) {
  StateVector reg = prepare_teleport_register(m);
  Measurement step1 = measure(reg, chi_qubit::kParticle1, Basis::Z, rng);
  BellMeasurement step2 = measure_bell(step1.state, chi_qubit::kMessage, chi_qubit::kParticle2, rng);
  Measurement step3 = measure(step2.state, chi_qubit::kParticle4, Basis::Z, rng);

  const TeleportOutcomes outcomes{step1.bit, step2.outcome, step3.bit};
  const StateVector corrected = apply_unitary(step3.state, chi_qubit::kParticle3, matrix_of(correction_for(outcomes)));
  auto recovered = factor_out_qubit(corrected, chi_qubit::kParticle3);
  if (!recovered) throw std::logic_error("particle 3 remained entangled after all measurements");
  return {outcomes, *recovered};
}

Table1Report oracle_verify_table1(const MessageQubit& m, const CorrectionLookup& lookup) {
  Table1Report report{m, {}, true, {}};
  const StateVector xi = prepare_message(m);
  const StateVector reg = prepare_teleport_register(m);

  for (const TeleportOutcomes& outcomes : TeleportOutcomes::all()) {
    BranchReport& branch = report.branches[static_cast<std::size_t>(outcomes.index())];
    branch.outcomes = outcomes;

    double probability = 0.0;
    auto forced = force_branch(reg, outcomes, false, &probability);
    branch.probability = probability;
    std::ostringstream why;
    if (!forced) {
      why << "branch " << outcomes.describe() << " has zero probability";
    } else {
      const auto particle3 = factor_out_qubit(*forced, chi_qubit::kParticle3);
      const auto reversed = force_branch(reg, outcomes, true, nullptr);
      if (!particle3) {
        why << "branch " << outcomes.describe() << ": particle 3 is still entangled";
      } else {
        branch.collapsed_fidelity = fidelity_up_to_phase(*particle3, collapsed_state_for(outcomes, m));
        const Pauli fix = lookup(outcomes);
        const StateVector recovered = apply_unitary(*particle3, 0, matrix_of(fix));
        branch.recovered_fidelity = fidelity_up_to_phase(recovered, xi);
        const auto fixed = contract_particle3(reg, outcomes);
        const Operator u = matrix_of(fix);
        const Complex c0 = u(0, 0) * fixed[0] + u(0, 1) * fixed[1];
        const Complex c1 = u(1, 0) * fixed[0] + u(1, 1) * fixed[1];
        const Complex overlap = std::conj(xi[0]) * c0 + std::conj(xi[1]) * c1;
        branch.recovered_phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex{0.0, 0.0};
        for (Pauli p : kAllPaulis) {
          if (fidelity_up_to_phase(apply_unitary(*particle3, 0, matrix_of(p)), xi) >= 1.0 - kFidelityTolerance) {
            branch.recovering_paulis.push_back(p);
          }
        }
        branch.order_independent =
            reversed && fidelity_up_to_phase(*reversed, *forced) >= 1.0 - kFidelityTolerance;

        if (branch.collapsed_fidelity < 1.0 - kFidelityTolerance) {
          why << "branch " << outcomes.describe() << ": particle 3 does not match the listed collapsed state (fidelity "
              << branch.collapsed_fidelity << ")";
        } else if (branch.recovered_fidelity < 1.0 - kFidelityTolerance) {
          why << "branch " << outcomes.describe() << ": correction " << to_string(fix)
              << " does not recover the message (fidelity " << branch.recovered_fidelity << ")";
        } else if (!branch.order_independent) {
          why << "branch " << outcomes.describe() << ": result depends on measurement order";
        }
      }
    }
    branch.passed = why.str().empty();
    if (!branch.passed && report.passed) {
      report.passed = false;
      report.failure = why.str();
    }
  }
  return report;
}

}  // namespace sqpbs
