#include "tpmrec/privacy.hpp"

#include <cmath>

#include "tpmrec/errors.hpp"
#include "tpmrec/random.hpp"

namespace tpmrec {

double information_bound_bits(int security_bits) {
  return std::ldexp(1.0, -security_bits) / kInformationBoundDivisor;
}

AmplificationBudget plan_budget(std::int64_t reconciled_bits, const LeakageEstimate& leakage,
                                std::int64_t disclosed_bits, int security_bits) {
  if (reconciled_bits < 0 || disclosed_bits < 0 || security_bits < 0) {
    throw RangeError("plan_budget: lengths and security parameter must be non-negative");
  }
  AmplificationBudget b;
  b.reconciled_bits = reconciled_bits;
  b.eve_bits = leakage.recommended_bit_reduction + disclosed_bits;
  b.security_bits = security_bits;
  if (security_bits >= reconciled_bits - b.eve_bits) {
    throw InfeasibleBudget("plan_budget: need S < M - E (M=" + std::to_string(reconciled_bits) +
                           ", E=" + std::to_string(b.eve_bits) +
                           ", S=" + std::to_string(security_bits) + ")");
  }
  b.final_bits = reconciled_bits - b.eve_bits - security_bits;
  b.information_bound = information_bound_bits(security_bits);
  return b;
}

ToeplitzSpec ToeplitzSpec::generate(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw RangeError("ToeplitzSpec: rows and cols must be >= 1");
  ToeplitzSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.seed = seed;
  Rng rng(derive_seed(seed, "toeplitz"));
  spec.diagonal = BitKey(cols + rows - 1);
  for (std::size_t i = 0; i < spec.diagonal.size(); ++i) spec.diagonal.set(i, rng.bit());
  return spec;
}

std::uint8_t ToeplitzSpec::entry(std::size_t i, std::size_t j) const {
  return j >= i ? diagonal[j - i] : diagonal[cols - 1 + i - j];
}

std::string ToeplitzSpec::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  const std::size_t n = diagonal.size();
  for (std::size_t byte = 0; byte * 8 < n; ++byte) {
    unsigned v = 0;
    for (std::size_t b = 0; b < 8; ++b) {
      const std::size_t i = byte * 8 + b;
      v = (v << 1) | (i < n ? diagonal[i] : 0U);
    }
    out.push_back(kDigits[v >> 4]);
    out.push_back(kDigits[v & 0xF]);
  }
  return out;
}

ToeplitzSpec ToeplitzSpec::from_hex(std::size_t rows, std::size_t cols, const std::string& hex,
                                    std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw RangeError("ToeplitzSpec: rows and cols must be >= 1");
  const std::size_t n = rows + cols - 1;
  if (hex.size() != 2 * ((n + 7) / 8)) {
    throw DimensionError("ToeplitzSpec::from_hex: wrong hex length for the given shape");
  }
  ToeplitzSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.seed = seed;
  spec.diagonal = BitKey(n);
  for (std::size_t i = 0; i < n; ++i) {
    const char c = hex[i / 4];
    int nibble = 0;
    if (c >= '0' && c <= '9') {
      nibble = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      nibble = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      nibble = c - 'A' + 10;
    } else {
      throw RangeError("ToeplitzSpec::from_hex: invalid hex digit");
    }
    spec.diagonal.set(i, (nibble >> (3 - i % 4)) & 1);
  }
  return spec;
}

BitKey amplify(const BitKey& key, const ToeplitzSpec& spec) {
  if (key.size() != spec.cols) {
    throw DimensionError("amplify: key has " + std::to_string(key.size()) + " bits, matrix has " +
                         std::to_string(spec.cols) + " columns");
  }
  if (spec.diagonal.size() != spec.rows + spec.cols - 1) {
    throw DimensionError("amplify: diagonal length must be rows + cols - 1");
  }
  BitKey out(spec.rows);
  for (std::size_t i = 0; i < spec.rows; ++i) {
    std::uint8_t acc = 0;
    for (std::size_t j = 0; j < spec.cols; ++j) acc ^= spec.entry(i, j) & key[j];
    out.set(i, acc);
  }
  return out;
}

}  // namespace tpmrec
