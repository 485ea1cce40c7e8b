#include "tpmrec/bit_key.hpp"

#include "tpmrec/errors.hpp"

namespace tpmrec {

BitKey::BitKey(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw RangeError("BitKey: bit values must be 0 or 1");
  }
}

BitKey::BitKey(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw RangeError("BitKey: bit values must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

BitKey BitKey::slice(std::size_t offset, std::size_t count) const {
  if (offset > bits_.size() || count > bits_.size() - offset) {
    throw RangeError("BitKey::slice out of range");
  }
  return BitKey(std::vector<std::uint8_t>(bits_.begin() + offset, bits_.begin() + offset + count));
}

std::size_t BitKey::hamming_distance(const BitKey& other) const {
  if (other.size() != size()) throw DimensionError("BitKey: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != other.bits_[i];
  return d;
}

BitKey BitKey::operator^(const BitKey& other) const {
  if (other.size() != size()) throw DimensionError("BitKey: length mismatch");
  BitKey out(size());
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] ^ other.bits_[i];
  return out;
}

std::uint64_t BitKey::digest() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  std::uint64_t n = bits_.size();
  for (int i = 0; i < 8; ++i) mix(static_cast<std::uint8_t>(n >> (8 * i)));
  // Pack eight bits per byte so the digest is independent of storage layout.
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    acc = static_cast<std::uint8_t>((acc << 1) | bits_[i]);
    if (i % 8 == 7) {
      mix(acc);
      acc = 0;
    }
  }
  if (bits_.size() % 8 != 0) mix(acc);
  return h;
}

std::string BitKey::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

BitKey BitKey::from_string(std::string_view text) {
  BitKey key;
  key.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw RangeError("BitKey::from_string: expected only '0' and '1'");
    key.bits_.push_back(c == '1');
  }
  return key;
}

}  // namespace tpmrec
