#include "sqpbs/bit_string.hpp"

#include <stdexcept>

namespace sqpbs {

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw std::invalid_argument("bit values must be 0 or 1");
  }
}

BitString BitString::parse(std::string_view text) {
  BitString out;
  out.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may contain only '0' and '1'");
    out.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

BitString BitString::random(std::size_t length, Rng& rng) {
  BitString out(length);
  for (std::size_t i = 0; i < length; ++i) out.bits_[i] = static_cast<std::uint8_t>(rng.bit());
  return out;
}

BitString BitString::slice(std::size_t offset, std::size_t length) const {
  if (offset > bits_.size() || length > bits_.size() - offset) throw std::out_of_range("bit string slice out of range");
  return BitString(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                                             bits_.begin() + static_cast<std::ptrdiff_t>(offset + length)));
}

BitString BitString::operator^(const BitString& other) const {
  if (other.size() != size()) throw std::invalid_argument("XOR of bit strings with different lengths");
  BitString out(size());
  for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] ^ other.bits_[i];
  return out;
}

std::size_t BitString::count_ones() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

std::size_t BitString::hamming_distance(const BitString& other) const { return (*this ^ other).count_ones(); }

std::vector<std::uint8_t> BitString::pack() const {
  std::vector<std::uint8_t> bytes((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return bytes;
}

std::string BitString::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = bits_[i] ? '1' : '0';
  return s;
}

}  // namespace sqpbs
