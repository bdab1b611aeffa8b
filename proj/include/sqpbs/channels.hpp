#pragma once

#include <span>
#include <string>
#include <vector>

#include "sqpbs/adversary.hpp"
#include "sqpbs/bit_string.hpp"
#include "sqpbs/party.hpp"
#include "sqpbs/rng.hpp"
#include "sqpbs/state_vector.hpp"
#include "sqpbs/transcript.hpp"

namespace sqpbs {

enum class DecoyState { Zero, One, Plus, Minus };

Basis basis_of(DecoyState d);
int bit_of(DecoyState d);
StateVector ket_of(DecoyState d);
const char* to_string(DecoyState d);
DecoyState random_decoy(Rng& rng);

/// One position of a transmitted sequence.
struct Slot {
  bool decoy;
  std::size_t index;  // into the payload list or into decoy_states
};

/// A sequence after transit, plus the preparer's private record of where the
/// decoys sit and what they were.
///
/// Payload qubits stay in their own registers (the sender's QubitRefs);
/// decoys are independent one-qubit registers owned here. Eve may append
/// probe qubits to any of them.
struct Transmission {
  std::string channel;
  Party from;
  Party to;
  std::vector<Slot> slots;
  std::vector<DecoyState> decoy_states;
  std::vector<StateVector> decoy_qubits;

  std::size_t payload_count() const { return slots.size() - decoy_states.size(); }
  std::vector<std::size_t> decoy_positions() const;
  /// Payload indices in transmitted order once decoys are dropped.
  std::vector<std::size_t> payload_order() const;
};

/// Interleaves `decoy_count` random decoys at uniformly random positions and
/// pushes every slot through `adversary`. Throws std::invalid_argument when
/// decoy_count is 0.
Transmission send_with_decoys(const std::string& channel, Party from, Party to, std::span<const QubitRef> payload,
                              std::size_t decoy_count, Rng& rng, Adversary* adversary = nullptr);

struct DecoyCheck {
  std::size_t decoys = 0;
  std::size_t errors = 0;
  double error_rate = 0.0;
  bool passed = true;
};

/// Receiver measures every decoy in its announced basis; the preparer
/// compares. Passes iff error_rate <= threshold.
DecoyCheck measure_decoys(Transmission& t, Rng& rng, double threshold);

/// measure_decoys, throwing ProtocolAbort(EavesdroppingDetected) on failure.
DecoyCheck check_decoys(Transmission& t, Rng& rng, double threshold);

struct ReturnCheck {
  std::size_t decoys = 0;
  std::vector<bool> reflected;                // per decoy: CTRL (true) or SIFT
  std::vector<std::size_t> reflection_order;  // decoy indices in the order they came back
  std::size_t reflected_count = 0;
  std::size_t reflected_errors = 0;
  std::size_t z_sift_count = 0;  // Z-prepared and SIFTed
  std::size_t z_sift_errors = 0;
  double reflected_rate = 0.0;
  double z_sift_rate = 0.0;
  bool passed = true;
};

/// Return check for a quantum -> semiquantum link (the classical party is t.to).
///
/// Sequence: the preparer announces decoy positions; for each decoy the
/// classical party SIFTs (Z-measures) or CTRLs (reflects) with probability
/// 1/2 and returns the reflected ones in a private random order; the
/// preparer announces which decoys were Z-prepared; the classical party then
/// reveals the CTRL positions and order; the preparer measures the returned
/// particles in their preparation bases. Finally the classical party
/// publishes its Z results and the preparer checks the Z-prepared SIFT subset.
ReturnCheck semiquantum_return_check(Transmission& t, Rng& rng, double threshold);

/// Probability that `decoy`, after Eve's coupling, reads the wrong bit in its own basis.
double decoy_disturbance(const EveParams& params, DecoyState decoy);

/// Mean of decoy_disturbance over the four decoy states.
double expected_decoy_error_rate(const EveParams& params);

/// Eve's reduced probe state after coupling to `decoy`.
Operator probe_state(const EveParams& params, DecoyState decoy);

struct Receipt {
  std::size_t seq;
};

/// Reliable, ordered, authenticated classical delivery, logged to the transcript.
Receipt classical_send(Party from, Party to, const std::string& label, const BitString& payload,
                       MessageCategory category, Transcript& transcript);

}  // namespace sqpbs
