/**
 * @file tpm.hpp
 * @brief Tree parity machine: shape, integer weights, forward pass, Hebbian update,
 *        and the fixed-width codec between key bits and weights.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tpmrec/bit_key.hpp"
#include "tpmrec/random.hpp"

namespace tpmrec {

/// Machine shape. Conventionally written (K, N, L).
struct TpmParams {
  int hidden_units = 1;     ///< K: neurons in the hidden layer
  int inputs_per_unit = 1;  ///< N: inputs feeding each hidden neuron
  int weight_bound = 1;     ///< L: weights live in [-L, L]

  /// Throws RangeError unless every field is >= 1.
  void validate() const;

  std::size_t weight_count() const noexcept {
    return static_cast<std::size_t>(hidden_units) * static_cast<std::size_t>(inputs_per_unit);
  }
  /// 2L + 1
  int alphabet_size() const noexcept { return 2 * weight_bound + 1; }
  /// ceil(log2(2L + 1)): width of one weight in the bit codec.
  int bits_per_weight() const noexcept;
  /// log2(2L + 1)
  double bits_of_entropy_per_weight() const noexcept;

  friend bool operator==(const TpmParams&, const TpmParams&) = default;
};

/// K x N matrix of +-1 entries, row-major (one row per hidden neuron).
class InputVector {
 public:
  InputVector(const TpmParams& params, std::vector<std::int8_t> entries);

  static InputVector random(const TpmParams& params, Rng& rng);

  const TpmParams& params() const noexcept { return params_; }
  std::span<const std::int8_t> row(int k) const;
  std::span<const std::int8_t> entries() const noexcept { return entries_; }

 private:
  TpmParams params_;
  std::vector<std::int8_t> entries_;
};

/// Hidden-layer signs, their product, and the local fields that produced them.
struct TpmEvaluation {
  std::vector<int> sigma;
  std::vector<int> local_field;
  int tau = 1;
};

class Tpm {
 public:
  /// All-zero weights.
  explicit Tpm(const TpmParams& params);
  /// Row-major weights; throws DimensionError on wrong size and RangeError on out-of-bound entries.
  Tpm(const TpmParams& params, std::vector<int> weights);

  /// Weights drawn uniformly from [-L, L].
  static Tpm random(const TpmParams& params, Rng& rng);

  const TpmParams& params() const noexcept { return params_; }
  std::span<const int> weights() const noexcept { return weights_; }
  std::span<const int> row(int k) const;
  int weight(int k, int n) const;
  void set_weight(std::size_t index, int value);

  /// 64-bit FNV-1a digest of the weight matrix; what parties exchange to detect synchronization.
  std::uint64_t digest() const noexcept;

  friend bool operator==(const Tpm&, const Tpm&) = default;

 private:
  friend void apply_hebbian(Tpm&, const InputVector&, const TpmEvaluation&, int);

  TpmParams params_;
  std::vector<int> weights_;
};

/// sgn with sgn(0) = -1.
constexpr int signum(int z) noexcept { return z > 0 ? 1 : -1; }

/// Clamp to [-bound, bound].
constexpr int clamp_weight(int w, int bound) noexcept {
  return w <= -bound ? -bound : (w >= bound ? bound : w);
}

/// Forward pass. Throws DimensionError if the input shape differs from the machine's.
TpmEvaluation evaluate(const Tpm& tpm, const InputVector& input);

/// In-place Hebbian update: every hidden row whose sigma equals tau moves by x * sigma,
/// clamped to [-L, L]; other rows are untouched. Throws ContractViolation if
/// own_eval.tau != partner_tau.
void apply_hebbian(Tpm& tpm, const InputVector& input, const TpmEvaluation& own_eval,
                   int partner_tau);

/// Value-returning form of apply_hebbian.
Tpm hebbian_step(const Tpm& tpm, const InputVector& input, const TpmEvaluation& own_eval,
                 int partner_tau);

/// Key bits consumed by bits_to_weights for this shape: K * N * ceil(log2(2L+1)).
std::size_t codec_bits(const TpmParams& params) noexcept;

/// Reads K*N consecutive big-endian chunks of bits_per_weight() bits; each chunk value v
/// becomes weight (v mod (2L+1)) - L. Trailing bits beyond codec_bits() are ignored.
/// Throws InsufficientMaterial if the key is shorter than codec_bits().
Tpm bits_to_weights(const BitKey& key, const TpmParams& params);

/// Each weight w is written as the big-endian bits_per_weight()-bit encoding of w + L.
BitKey weights_to_bits(const Tpm& tpm);

/// Fraction of positions where the two machines hold the same weight.
double weight_overlap(const Tpm& a, const Tpm& b);

/// Number of positions where the two machines differ.
std::size_t weight_mismatches(const Tpm& a, const Tpm& b);

}  // namespace tpmrec
