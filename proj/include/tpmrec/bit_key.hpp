#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tpmrec {

/// Ordered sequence of key bits. Each element is 0 or 1.
class BitKey {
 public:
  BitKey() = default;
  explicit BitKey(std::size_t length) : bits_(length, 0) {}
  explicit BitKey(std::vector<std::uint8_t> bits);
  BitKey(std::initializer_list<int> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::uint8_t at(std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }
  void flip(std::size_t i) { bits_.at(i) ^= 1U; }
  void push_back(bool value) { bits_.push_back(value ? 1 : 0); }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  /// Bits [offset, offset + count).
  BitKey slice(std::size_t offset, std::size_t count) const;

  /// Number of positions where the two keys differ. Keys must have equal length.
  std::size_t hamming_distance(const BitKey& other) const;

  /// Bitwise XOR of two equal-length keys.
  BitKey operator^(const BitKey& other) const;

  /// 64-bit FNV-1a digest over the bit sequence and its length.
  std::uint64_t digest() const noexcept;

  /// '0'/'1' string, first bit leftmost.
  std::string to_string() const;
  static BitKey from_string(std::string_view text);

  friend bool operator==(const BitKey&, const BitKey&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace tpmrec
