/**
 * @file channel.hpp
 * @brief Classical stand-in for the quantum channel: correlated raw keys with a
 *        configurable bit-flip model, and error-rate estimation by sacrificing a sample.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "tpmrec/bit_key.hpp"

namespace tpmrec {

enum class ErrorModel {
  Uniform,  ///< binary symmetric channel: independent flips
  Burst,    ///< flips arrive in runs of fixed length
};

struct NoiseConfig {
  ErrorModel model = ErrorModel::Uniform;
  /// Run length for ErrorModel::Burst. Runs start with probability qber / burst_length,
  /// so the expected error rate stays close to qber when qber * burst_length is small.
  int burst_length = 4;
};

struct NoisyKeyPair {
  BitKey alice;
  BitKey bob;
  std::vector<std::size_t> error_positions;  ///< sorted; exactly where alice and bob differ
  double nominal_qber = 0.0;
};

struct QberEstimate {
  std::size_t sampled_count = 0;
  std::size_t mismatches = 0;
  double estimate = 0.0;
  std::vector<std::size_t> disclosed_positions;  ///< sorted, indices into the original pair
  NoisyKeyPair remaining;                         ///< the pair with every disclosed bit removed

  const BitKey& remaining_alice() const noexcept { return remaining.alice; }
  const BitKey& remaining_bob() const noexcept { return remaining.bob; }
};

/// Uniform random Alice key; Bob's copy passes through the noise model.
/// Throws RangeError unless length >= 1 and 0 <= qber <= 0.5.
NoisyKeyPair generate_key_pair(std::size_t length, double qber, std::uint64_t seed,
                               const NoiseConfig& noise = {});

/// Pair built from two existing keys; the error set is recomputed.
NoisyKeyPair make_key_pair(BitKey alice, BitKey bob, double nominal_qber = 0.0);

/// Discloses floor(sample_fraction * length) positions chosen without replacement,
/// counts mismatches on them and removes them from both keys.
/// Throws RangeError when the fraction is not in (0, 1) or the sample would be empty.
QberEstimate estimate_qber(const NoisyKeyPair& pair, double sample_fraction, std::uint64_t seed);

}  // namespace tpmrec
