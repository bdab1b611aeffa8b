#include "sqpbs/crypto_keys.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <sstream>

#include "sqpbs/errors.hpp"

namespace sqpbs {
namespace {

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void append_bits(std::vector<std::uint8_t>& out, const BitString& bits) {
  append_u64(out, bits.size());
  const auto packed = bits.pack();
  out.insert(out.end(), packed.begin(), packed.end());
}

void check_threshold(const KeyEstablishment& k, double threshold, const char* scheme) {
  if (k.error_rate > threshold) {
    std::ostringstream os;
    os << scheme << " error rate " << k.error_rate << " exceeds threshold " << threshold;
    throw ProtocolAbort(AbortReason::KeyEstablishmentFailed, os.str());
  }
}

}  // namespace

BitString xor_blind(const BitString& message, const BitString& key) {
  if (message.size() != key.size()) throw std::invalid_argument("xor_blind: message and key lengths differ");
  return message ^ key;
}

BitString otp_encrypt(const BitString& key, const BitString& msg) {
  if (key.size() < msg.size()) throw std::length_error("one-time pad key shorter than message");
  return msg ^ key.slice(0, msg.size());
}

BitString otp_decrypt(const BitString& key, const BitString& ciphertext) { return otp_encrypt(key, ciphertext); }

BitString OneTimePad::apply(std::size_t offset, const BitString& msg) {
  if (offset > key_.size() || msg.size() > key_.size() - offset) {
    throw std::length_error("one-time pad exhausted");
  }
  for (std::size_t i = offset; i < offset + msg.size(); ++i) {
    if (used_[i]) throw KeyReuseError("one-time pad bit " + std::to_string(i) + " already used");
  }
  for (std::size_t i = offset; i < offset + msg.size(); ++i) used_[i] = true;
  next_ = std::max(next_, offset + msg.size());
  return msg ^ key_.slice(offset, msg.size());
}

BitString keyed_hash(const HashConfig& cfg, const BitString& secret, const BitString& msg) {
  if (cfg.output_bits == 0) throw std::invalid_argument("hash output length must be positive");
  const EVP_MD* md = EVP_get_digestbyname(cfg.algorithm.c_str());
  if (md == nullptr) throw std::invalid_argument("unknown hash algorithm '" + cfg.algorithm + "'");

  std::vector<std::uint8_t> body;
  append_bits(body, secret);
  append_bits(body, msg);

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  BitString out;
  for (std::uint32_t counter = 0; out.size() < cfg.output_bits; ++counter) {
    const std::uint8_t prefix[4] = {static_cast<std::uint8_t>(counter >> 24), static_cast<std::uint8_t>(counter >> 16),
                                    static_cast<std::uint8_t>(counter >> 8), static_cast<std::uint8_t>(counter)};
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 || EVP_DigestUpdate(ctx.get(), prefix, sizeof prefix) != 1 ||
        EVP_DigestUpdate(ctx.get(), body.data(), body.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
      throw std::runtime_error("digest computation failed");
    }
    for (unsigned int i = 0; i < len * 8 && out.size() < cfg.output_bits; ++i) {
      out.push_back((digest[i / 8] >> (7 - i % 8)) & 1);
    }
  }
  return out;
}

void KeyRing::validate() const {
  if (k_a.size() != n || k_bt.size() != n || k_ct.size() != n || k_dt.size() != 2 * n) {
    throw std::logic_error("key ring lengths must be (n, n, n, 2n)");
  }
}

KeyEstablishment establish_key_bb84(std::size_t length, Rng& rng, Adversary* eve, double threshold) {
  if (length == 0) throw std::invalid_argument("key length must be at least 1");
  KeyEstablishment out;
  BitString sent;
  BitString received;
  while (sent.size() < 2 * length) {
    const int bit = rng.bit();
    const Basis prep = rng.bit() ? Basis::X : Basis::Z;
    StateVector qubit = kets::basis_state(prep, bit);
    ++out.raw_qubits;
    if (eve) eve->intercept({&qubit, 0});
    const Basis meas = rng.bit() ? Basis::X : Basis::Z;
    const int result = measure(qubit, 0, meas, rng).bit;
    if (meas == prep) {
      sent.push_back(bit);
      received.push_back(result);
    }
  }
  out.sifted_bits = sent.size();

  const auto check = random_subset_mask(sent.size(), length, rng);
  for (std::size_t i = 0; i < sent.size(); ++i) {
    if (check[i]) {
      ++out.check_bits;
      out.check_errors += sent[i] != received[i];
    } else {
      out.quantum_key.push_back(sent[i]);
      out.partner_key.push_back(received[i]);
    }
  }
  out.error_rate = static_cast<double>(out.check_errors) / static_cast<double>(out.check_bits);
  check_threshold(out, threshold, "BB84");
  return out;
}

KeyEstablishment establish_key_sqkd(std::size_t length, Rng& rng, Party classical_party, Adversary* eve,
                                    double threshold) {
  if (length == 0) throw std::invalid_argument("key length must be at least 1");
  KeyEstablishment out;
  BitString trent_bits;
  BitString partner_bits;
  while (trent_bits.size() < 2 * length) {
    const int bit = rng.bit();
    const Basis prep = rng.bit() ? Basis::X : Basis::Z;
    StateVector qubit = kets::basis_state(prep, bit);
    ++out.raw_qubits;
    if (eve) eve->intercept({&qubit, 0});

    const bool sift = rng.bit() == 1;
    if (sift) {
      require_capability(classical_party, QuantumOp::MeasureZ);
      const int r = measure(qubit, 0, Basis::Z, rng).bit;
      require_capability(classical_party, QuantumOp::PrepareZ);
      const StateVector fresh = kets::basis_state(Basis::Z, r);
      // Trent reads the partner's bit off the returned qubit.
      const int returned = measure(fresh, 0, Basis::Z, rng).bit;
      if (prep == Basis::Z) {
        trent_bits.push_back(bit);
        partner_bits.push_back(returned);
      }
    } else {
      require_capability(classical_party, QuantumOp::Reflect);
      const int result = measure(qubit, 0, prep, rng).bit;
      ++out.reflected;
      out.reflected_errors += result != bit;
      if (prep == Basis::X) {
        ++out.reflected_x;
        out.reflected_x_errors += result != bit;
      }
    }
  }
  out.sifted_bits = trent_bits.size();

  const auto check = random_subset_mask(trent_bits.size(), length, rng);
  for (std::size_t i = 0; i < trent_bits.size(); ++i) {
    if (check[i]) {
      ++out.check_bits;
      out.check_errors += trent_bits[i] != partner_bits[i];
    } else {
      out.quantum_key.push_back(trent_bits[i]);
      out.partner_key.push_back(partner_bits[i]);
    }
  }
  const double sift_rate = static_cast<double>(out.check_errors) / static_cast<double>(out.check_bits);
  const double ctrl_rate =
      out.reflected ? static_cast<double>(out.reflected_errors) / static_cast<double>(out.reflected) : 0.0;
  out.error_rate = std::max(sift_rate, ctrl_rate);
  check_threshold(out, threshold, "SQKD");
  return out;
}

}  // namespace sqpbs
