#include "sqpbs/party.hpp"

#include <string>

#include "sqpbs/errors.hpp"

namespace sqpbs {

const char* to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::EavesdroppingDetected: return "eavesdropping_detected";
    case AbortReason::KeyEstablishmentFailed: return "key_establishment_failed";
    case AbortReason::MissingRecord: return "missing_record";
  }
  return "?";
}

const char* to_string(Party party) {
  switch (party) {
    case Party::Alice: return "Alice";
    case Party::Bob: return "Bob";
    case Party::Charlie: return "Charlie";
    case Party::David: return "David";
    case Party::Trent: return "Trent";
    case Party::Eve: return "Eve";
  }
  return "?";
}

const char* to_string(QuantumOp op) {
  switch (op) {
    case QuantumOp::PrepareZ: return "prepare_z";
    case QuantumOp::PrepareX: return "prepare_x";
    case QuantumOp::PrepareEntangled: return "prepare_entangled";
    case QuantumOp::MeasureZ: return "measure_z";
    case QuantumOp::MeasureX: return "measure_x";
    case QuantumOp::MeasureBell: return "measure_bell";
    case QuantumOp::ApplyUnitary: return "apply_unitary";
    case QuantumOp::Reflect: return "reflect";
    case QuantumOp::Reorder: return "reorder";
  }
  return "?";
}

bool is_semiquantum(Party party) { return party == Party::Bob || party == Party::Charlie; }

bool has_capability(Party party, QuantumOp op) {
  if (!is_semiquantum(party)) return true;
  switch (op) {
    case QuantumOp::PrepareZ:
    case QuantumOp::MeasureZ:
    case QuantumOp::Reflect:
    case QuantumOp::Reorder:
      return true;
    default:
      return false;
  }
}

void require_capability(Party party, QuantumOp op) {
  if (!has_capability(party, op)) {
    throw CapabilityError(std::string(to_string(party)) + " is semiquantum and cannot perform " + to_string(op));
  }
}

}  // namespace sqpbs
