/**
 * @file privacy.hpp
 * @brief Privacy amplification: length budget and Toeplitz universal hashing over GF(2).
 */
#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "tpmrec/bit_key.hpp"
#include "tpmrec/leakage.hpp"

namespace tpmrec {

/// Divisor in the bound 2^-S / d on Eve's expected information about the final key.
/// Natural-log reading: d = ln 2. Use 1.0 here for the base-2 reading.
inline constexpr double kInformationBoundDivisor = std::numbers::ln2;

/// Eve's expected information (bits) after removing S extra bits.
double information_bound_bits(int security_bits);

struct AmplificationBudget {
  std::int64_t reconciled_bits = 0;  ///< M
  std::int64_t eve_bits = 0;         ///< E
  int security_bits = 0;             ///< S
  std::int64_t final_bits = 0;       ///< R = M - E - S
  double information_bound = 0.0;    ///< 2^-S / ln 2
};

/// E = leakage.recommended_bit_reduction + disclosed_bits, R = M - E - S.
/// Throws InfeasibleBudget unless S < M - E, RangeError for negative inputs.
AmplificationBudget plan_budget(std::int64_t reconciled_bits, const LeakageEstimate& leakage,
                                std::int64_t disclosed_bits, int security_bits);

/// R x M binary Toeplitz matrix described by M + R - 1 bits:
/// entry(i, j) = diagonal[j - i] for j >= i, diagonal[M - 1 + i - j] otherwise.
/// So the first M bits are row 0 and the remaining R - 1 bits continue column 0 downward.
struct ToeplitzSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  BitKey diagonal;
  std::uint64_t seed = 0;

  /// Random matrix from the seed.
  static ToeplitzSpec generate(std::size_t rows, std::size_t cols, std::uint64_t seed);

  std::uint8_t entry(std::size_t i, std::size_t j) const;

  /// Diagonal bits packed MSB-first into bytes, lowercase hex, zero-padded at the end.
  std::string to_hex() const;
  static ToeplitzSpec from_hex(std::size_t rows, std::size_t cols, const std::string& hex,
                               std::uint64_t seed = 0);
};

/// Toeplitz(spec) * key over GF(2). Throws DimensionError if key.size() != spec.cols.
BitKey amplify(const BitKey& key, const ToeplitzSpec& spec);

}  // namespace tpmrec
