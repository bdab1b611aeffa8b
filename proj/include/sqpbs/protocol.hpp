#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqpbs/adversary.hpp"
#include "sqpbs/bit_string.hpp"
#include "sqpbs/channels.hpp"
#include "sqpbs/chi_teleport.hpp"
#include "sqpbs/crypto_keys.hpp"
#include "sqpbs/party.hpp"
#include "sqpbs/rng.hpp"
#include "sqpbs/transcript.hpp"

namespace sqpbs {

/// Quantum links of the protocol.
enum class QuantumChannel {
  W1,      // Trent -> Bob (particle 1 sequence)
  W2,      // Trent -> David (particle 2 sequence)
  W4,      // Trent -> Charlie (particle 4 sequence)
  XiM,     // Alice -> David (blinded message qubits)
  GPrime,  // Trent -> Charlie (re-encoded message)
};

const char* to_string(QuantumChannel channel);
QuantumChannel parse_channel(const std::string& text);

enum class AttackKind { None, InterceptResend, EntangleMeasure, ForgeMd };

const char* to_string(AttackKind kind);
AttackKind parse_attack(const std::string& text);

/// How a forger without K_DT produces the M_D ciphertext Trent receives.
enum class ForgeryModel {
  OutsideRandomMd,  // outsider replaces the ciphertext with uniform bits
  InsideNoKey,      // insider (Bob) knows M_B, picks an M_D and encrypts under a guessed key
};

const char* to_string(ForgeryModel model);
ForgeryModel parse_forgery(const std::string& text);

enum class KeyMode { Simulated, Stubbed };

struct AttackSpec {
  AttackKind kind = AttackKind::None;
  QuantumChannel channel = QuantumChannel::XiM;  // for intercept-resend / entangle-measure
  std::optional<EveParams> eve;                  // required for entangle-measure
  ForgeryModel forgery = ForgeryModel::OutsideRandomMd;
  std::vector<std::size_t> tamper_md_bits;       // ciphertext bits of E_KDT(M_D) flipped in transit
  std::optional<Party> withhold;                 // Bob, David or Charlie never sends its record
};

struct RunConfig {
  std::size_t n = 8;
  std::uint64_t seed = 0;
  std::size_t decoys = 0;  // per quantum transmission; 0 means n
  double threshold = 0.0;
  AttackSpec attack;
  HashConfig hash;
  KeyMode key_mode = KeyMode::Simulated;
  std::size_t hash_secret_bits = 256;
  std::string seed_source;  // where the seed came from, echoed when set

  std::size_t decoy_count() const { return decoys ? decoys : n; }

  /// Throws ConfigError.
  void validate() const;

  Json to_json() const;
  static RunConfig from_json(const Json& j);
};

Json to_json(const EveParams& params);
EveParams eve_params_from_json(const Json& j);

/// Alice's private message and blinding key. Normally derived from the seed.
struct AliceInputs {
  BitString g_a;
  BitString k_a;
};

enum class Verdict { Valid, Invalid, Aborted };

const char* to_string(Verdict verdict);

/// Qubits and classical bits consumed, split the way efficiency accounting needs.
struct QubitLedger {
  std::size_t chi_qubits = 0;
  std::size_t message_qubits = 0;
  std::size_t g_prime_qubits = 0;
  std::size_t decoy_qubits = 0;
  std::size_t bb84_raw_qubits = 0;
  std::size_t sqkd_raw_qubits = 0;
  std::size_t bb84_key_bits = 0;
  std::size_t sqkd_key_bits = 0;
};

/// Everything one run holds. Register i is χ instance i, laid out per
/// chi_qubit once the blindness phase has prepended |ξ_i>_m; before that it
/// holds particles 1-4 only. Eve's probe qubits, if any, are appended.
struct ProtocolState {
  explicit ProtocolState(RunConfig cfg);

  RunConfig config;
  Phase phase = Phase::Init;
  Rng rng;
  std::unique_ptr<Adversary> adversary;
  Transcript transcript;
  QubitLedger ledger;

  // Private to their holders; never logged.
  KeyRing keys;
  BitString g_a;
  BitString g;
  bool inputs_supplied = false;

  std::vector<StateVector> registers;
  std::vector<Transmission> pending;  // W1', W2', W4' awaiting their checks

  BitString hash_g;  // Charlie's copy of H(g)
  BitString m_b;     // as decrypted by Trent
  BitString m_d;
  BitString m_c;
  std::vector<Pauli> corrections;
  std::vector<StateVector> recovered;  // Trent's registers after correction, before his X measurement
  BitString g_prime_sent;              // Trent's G'
  std::vector<StateVector> g_prime_qubits;
  BitString g_prime;                   // Charlie's reading
  std::optional<Verdict> verdict;

  /// Register index of `particle` (0 = m, 1..4) for the current layout.
  int qubit_of(int particle) const;
};

/// Capability-checked measurements used by every participant.
Measurement party_measure(Party party, const StateVector& state, int qubit, Basis basis, Rng& rng);
BellMeasurement party_measure_bell(Party party, const StateVector& state, int qubit_a, int qubit_b, Rng& rng);

/// Key establishment, χ preparation and W1'/W2'/W4' dispatch, blinding and H(g).
ProtocolState phase_initialize(const RunConfig& config, const std::optional<AliceInputs>& inputs = std::nullopt);

/// Table 2 encoding: g_i = 0 -> |+>, g_i = 1 -> |->.
void phase_blind(ProtocolState& state);

/// Authorization and signing; ends with G'' sent to Charlie.
void phase_sign(ProtocolState& state);

/// Charlie's check of G'' and the hash comparison.
Verdict phase_verify(ProtocolState& state);

/// All four phases. Aborts are recorded in the state's transcript, not thrown.
ProtocolState run_protocol(const RunConfig& config, const std::optional<AliceInputs>& inputs = std::nullopt);

Transcript run_full(const RunConfig& config, const std::optional<AliceInputs>& inputs = std::nullopt);

/// Table 2 message qubit for one blinded bit.
MessageQubit blinded_message_qubit(int bit);

}  // namespace sqpbs
