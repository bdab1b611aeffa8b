#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sqpbs/rng.hpp"

namespace sqpbs {

/// Ordered sequence of bits. Text form is '0'/'1' characters, first bit first.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t length) : bits_(length, 0) {}
  explicit BitString(std::vector<std::uint8_t> bits);

  static BitString parse(std::string_view text);
  static BitString random(std::size_t length, Rng& rng);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  int operator[](std::size_t i) const { return bits_[i]; }
  int at(std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, int value) { bits_.at(i) = static_cast<std::uint8_t>(value & 1); }
  void flip(std::size_t i) { bits_.at(i) ^= 1; }
  void push_back(int value) { bits_.push_back(static_cast<std::uint8_t>(value & 1)); }

  BitString slice(std::size_t offset, std::size_t length) const;
  BitString operator^(const BitString& other) const;  // throws on length mismatch

  std::size_t count_ones() const;
  std::size_t hamming_distance(const BitString& other) const;

  /// Big-endian packing, zero-padded in the last byte.
  std::vector<std::uint8_t> pack() const;

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace sqpbs
