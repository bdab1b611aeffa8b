#pragma once

namespace sqpbs {

enum class Party { Alice, Bob, Charlie, David, Trent, Eve };

/// Quantum actions a participant may take on a qubit.
enum class QuantumOp {
  PrepareZ,
  PrepareX,
  PrepareEntangled,
  MeasureZ,
  MeasureX,
  MeasureBell,
  ApplyUnitary,
  Reflect,
  Reorder,
};

const char* to_string(Party party);
const char* to_string(QuantumOp op);

/// Bob and Charlie are restricted to Z preparation/measurement, reflection and reordering.
bool is_semiquantum(Party party);

bool has_capability(Party party, QuantumOp op);

/// Throws CapabilityError when `party` may not perform `op`.
void require_capability(Party party, QuantumOp op);

}  // namespace sqpbs
