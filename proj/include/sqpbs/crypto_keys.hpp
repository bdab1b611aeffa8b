#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqpbs/adversary.hpp"
#include "sqpbs/bit_string.hpp"
#include "sqpbs/party.hpp"
#include "sqpbs/rng.hpp"

namespace sqpbs {

/// g_i = g_A,i XOR K_A,i.
BitString xor_blind(const BitString& message, const BitString& key);

/// msg XOR key[0, |msg|). Throws std::length_error when the key is shorter.
BitString otp_encrypt(const BitString& key, const BitString& msg);
BitString otp_decrypt(const BitString& key, const BitString& ciphertext);

class KeyReuseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// One party's copy of a pre-shared pad. Tracks which key bits have been
/// consumed so that no bit encrypts twice within a run.
class OneTimePad {
 public:
  explicit OneTimePad(BitString key) : key_(std::move(key)), used_(key_.size(), false) {}

  /// XORs `msg` with key bits [offset, offset + |msg|) and marks them used.
  BitString apply(std::size_t offset, const BitString& msg);

  /// apply() at the first unused offset.
  BitString apply_next(const BitString& msg) { return apply(next_, msg); }

  std::size_t size() const { return key_.size(); }
  std::size_t remaining() const { return key_.size() - next_; }

 private:
  BitString key_;
  std::vector<bool> used_;
  std::size_t next_ = 0;
};

/// Alice-Charlie shared keyed hash H(.), modeled as digest(secret || message)
/// under a standard hash, expanded in counter mode and truncated to output_bits.
struct HashConfig {
  std::string algorithm = "sha256";
  std::size_t output_bits = 256;
};

BitString keyed_hash(const HashConfig& cfg, const BitString& secret, const BitString& msg);

/// Private keys held after the initializing phase. Lengths (n, n, n, 2n).
struct KeyRing {
  std::size_t n = 0;
  BitString k_a;   // Alice, local
  BitString k_bt;  // Bob-Trent
  BitString k_ct;  // Charlie-Trent
  BitString k_dt;  // David-Trent
  BitString hash_secret;

  /// Throws std::logic_error if any length disagrees with n.
  void validate() const;
};

/// Outcome of one simulated key establishment.
struct KeyEstablishment {
  BitString quantum_key;    // Trent's copy
  BitString partner_key;    // partner's copy
  std::size_t raw_qubits = 0;
  std::size_t sifted_bits = 0;
  std::size_t check_bits = 0;
  std::size_t check_errors = 0;
  double error_rate = 0.0;  // the rate the abort decision uses

  // Semiquantum only: reflected (CTRL) positions checked in their preparation basis.
  std::size_t reflected = 0;
  std::size_t reflected_errors = 0;
  std::size_t reflected_x = 0;
  std::size_t reflected_x_errors = 0;
};

/// BB84 between two quantum parties: random bit and basis per qubit, basis
/// sifting, then half of the 2*length sifted bits are disclosed to estimate
/// the error rate. Throws ProtocolAbort(KeyEstablishmentFailed) above threshold.
KeyEstablishment establish_key_bb84(std::size_t length, Rng& rng, Adversary* eve = nullptr, double threshold = 0.0);

/// Semiquantum exchange between Trent and a classical partner: Trent sends
/// Z/X-random qubits; the partner either measures in Z and resends a fresh Z
/// qubit (SIFT) or reflects (CTRL). Key bits come from SIFT positions Trent
/// prepared in Z. The adversary acts on the forward leg.
KeyEstablishment establish_key_sqkd(std::size_t length, Rng& rng, Party classical_party, Adversary* eve = nullptr,
                                    double threshold = 0.0);

}  // namespace sqpbs
