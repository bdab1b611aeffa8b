#include "sqpbs/channels.hpp"

#include <sstream>
#include <stdexcept>

#include "sqpbs/errors.hpp"

namespace sqpbs {
namespace {

double rate(std::size_t errors, std::size_t total) {
  return total ? static_cast<double>(errors) / static_cast<double>(total) : 0.0;
}

// Register holding the decoy plus a fresh probe, after Eve's coupling.
StateVector coupled_decoy(const EveParams& params, DecoyState decoy) {
  StateVector reg = ket_of(decoy);
  eve_entangle_measure(params, {&reg, 0});
  return reg;
}

}  // namespace

Basis basis_of(DecoyState d) { return (d == DecoyState::Zero || d == DecoyState::One) ? Basis::Z : Basis::X; }

int bit_of(DecoyState d) { return (d == DecoyState::One || d == DecoyState::Minus) ? 1 : 0; }

StateVector ket_of(DecoyState d) { return kets::basis_state(basis_of(d), bit_of(d)); }

const char* to_string(DecoyState d) {
  switch (d) {
    case DecoyState::Zero: return "0";
    case DecoyState::One: return "1";
    case DecoyState::Plus: return "+";
    case DecoyState::Minus: return "-";
  }
  return "?";
}

DecoyState random_decoy(Rng& rng) { return static_cast<DecoyState>(rng.below(4)); }

std::vector<std::size_t> Transmission::decoy_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].decoy) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Transmission::payload_order() const {
  std::vector<std::size_t> out;
  for (const Slot& s : slots) {
    if (!s.decoy) out.push_back(s.index);
  }
  return out;
}

Transmission send_with_decoys(const std::string& channel, Party from, Party to, std::span<const QubitRef> payload,
                              std::size_t decoy_count, Rng& rng, Adversary* adversary) {
  if (decoy_count == 0) throw std::invalid_argument("at least one decoy particle is required");
  Transmission t{channel, from, to, {}, {}, {}};
  t.decoy_states.reserve(decoy_count);
  t.decoy_qubits.reserve(decoy_count);
  for (std::size_t k = 0; k < decoy_count; ++k) {
    t.decoy_states.push_back(random_decoy(rng));
    t.decoy_qubits.push_back(ket_of(t.decoy_states.back()));
  }

  const std::size_t total = payload.size() + decoy_count;
  const auto is_decoy = random_subset_mask(total, decoy_count, rng);
  std::size_t next_payload = 0;
  std::size_t next_decoy = 0;
  for (std::size_t pos = 0; pos < total; ++pos) {
    t.slots.push_back(is_decoy[pos] ? Slot{true, next_decoy++} : Slot{false, next_payload++});
  }

  if (adversary) {
    for (const Slot& s : t.slots) {
      adversary->intercept(s.decoy ? QubitRef{&t.decoy_qubits[s.index], 0} : payload[s.index]);
    }
  }
  return t;
}

DecoyCheck measure_decoys(Transmission& t, Rng& rng, double threshold) {
  DecoyCheck out;
  out.decoys = t.decoy_states.size();
  for (std::size_t k = 0; k < out.decoys; ++k) {
    const DecoyState prepared = t.decoy_states[k];
    const Basis basis = basis_of(prepared);
    require_capability(t.to, basis == Basis::Z ? QuantumOp::MeasureZ : QuantumOp::MeasureX);
    Measurement m = measure(t.decoy_qubits[k], 0, basis, rng);
    t.decoy_qubits[k] = std::move(m.state);
    out.errors += m.bit != bit_of(prepared);
  }
  out.error_rate = rate(out.errors, out.decoys);
  out.passed = out.error_rate <= threshold;
  return out;
}

DecoyCheck check_decoys(Transmission& t, Rng& rng, double threshold) {
  DecoyCheck out = measure_decoys(t, rng, threshold);
  if (!out.passed) {
    std::ostringstream os;
    os << t.channel << ": decoy error rate " << out.error_rate << " exceeds threshold " << threshold;
    throw ProtocolAbort(AbortReason::EavesdroppingDetected, os.str());
  }
  return out;
}

ReturnCheck semiquantum_return_check(Transmission& t, Rng& rng, double threshold) {
  const Party classical = t.to;
  ReturnCheck out;
  out.decoys = t.decoy_states.size();
  out.reflected.assign(out.decoys, false);

  // Classical party: SIFT or CTRL each announced decoy.
  std::vector<int> sift_result(out.decoys, -1);
  std::vector<std::size_t> reflected_ids;
  for (std::size_t k = 0; k < out.decoys; ++k) {
    if (rng.bit()) {
      require_capability(classical, QuantumOp::Reflect);
      out.reflected[k] = true;
      reflected_ids.push_back(k);
    } else {
      require_capability(classical, QuantumOp::MeasureZ);
      Measurement m = measure(t.decoy_qubits[k], 0, Basis::Z, rng);
      t.decoy_qubits[k] = std::move(m.state);
      sift_result[k] = m.bit;
    }
  }

  // Reflected particles go back in a private random order.
  require_capability(classical, QuantumOp::Reorder);
  const auto shuffle = random_permutation(reflected_ids.size(), rng);
  std::vector<StateVector> returned;
  returned.reserve(reflected_ids.size());
  for (std::size_t j = 0; j < reflected_ids.size(); ++j) {
    out.reflection_order.push_back(reflected_ids[shuffle[j]]);
    returned.push_back(t.decoy_qubits[reflected_ids[shuffle[j]]]);
  }

  // Trent holds `returned`; after the order is revealed he measures each in its preparation basis.
  for (std::size_t j = 0; j < returned.size(); ++j) {
    const std::size_t k = out.reflection_order[j];
    const DecoyState prepared = t.decoy_states[k];
    const int bit = measure(returned[j], 0, basis_of(prepared), rng).bit;
    ++out.reflected_count;
    out.reflected_errors += bit != bit_of(prepared);
  }

  // Published Z results vs Z-prepared decoys.
  for (std::size_t k = 0; k < out.decoys; ++k) {
    if (out.reflected[k] || basis_of(t.decoy_states[k]) != Basis::Z) continue;
    ++out.z_sift_count;
    out.z_sift_errors += sift_result[k] != bit_of(t.decoy_states[k]);
  }

  out.reflected_rate = rate(out.reflected_errors, out.reflected_count);
  out.z_sift_rate = rate(out.z_sift_errors, out.z_sift_count);
  out.passed = out.reflected_rate <= threshold && out.z_sift_rate <= threshold;
  return out;
}

double decoy_disturbance(const EveParams& params, DecoyState decoy) {
  const StateVector reg = coupled_decoy(params, decoy);
  return outcome_probabilities(reg, 0, basis_of(decoy))[static_cast<std::size_t>(1 - bit_of(decoy))];
}

double expected_decoy_error_rate(const EveParams& params) {
  double sum = 0.0;
  for (DecoyState d : {DecoyState::Zero, DecoyState::One, DecoyState::Plus, DecoyState::Minus}) {
    sum += decoy_disturbance(params, d);
  }
  return sum / 4.0;
}

Operator probe_state(const EveParams& params, DecoyState decoy) {
  if (params.probe_qubits() == 0) return Operator::Identity(1, 1);
  const StateVector reg = coupled_decoy(params, decoy);
  std::vector<int> probe;
  for (int k = 1; k < reg.num_qubits(); ++k) probe.push_back(k);
  return reduced_density_matrix(reg, probe);
}

Receipt classical_send(Party from, Party to, const std::string& label, const BitString& payload,
                       MessageCategory category, Transcript& transcript) {
  return {transcript.add_classical(from, to, label, payload, category)};
}

}  // namespace sqpbs
