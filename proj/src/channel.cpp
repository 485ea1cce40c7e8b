#include "tpmrec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tpmrec/errors.hpp"
#include "tpmrec/random.hpp"

namespace tpmrec {

NoisyKeyPair generate_key_pair(std::size_t length, double qber, std::uint64_t seed,
                               const NoiseConfig& noise) {
  if (length < 1) throw RangeError("generate_key_pair: length must be >= 1");
  if (!(qber >= 0.0 && qber <= 0.5)) {
    throw RangeError("generate_key_pair: qber must lie in [0, 0.5]");
  }
  if (noise.model == ErrorModel::Burst && noise.burst_length < 1) {
    throw RangeError("generate_key_pair: burst_length must be >= 1");
  }

  Rng key_rng(derive_seed(seed, "alice-key"));
  Rng noise_rng(derive_seed(seed, "channel-noise"));

  NoisyKeyPair pair;
  pair.nominal_qber = qber;
  pair.alice = BitKey(length);
  for (std::size_t i = 0; i < length; ++i) pair.alice.set(i, key_rng.bit());
  pair.bob = pair.alice;

  std::vector<std::uint8_t> flipped(length, 0);
  if (noise.model == ErrorModel::Uniform) {
    for (std::size_t i = 0; i < length; ++i) flipped[i] = noise_rng.bernoulli(qber);
  } else {
    const double start = qber / noise.burst_length;
    for (std::size_t i = 0; i < length; ++i) {
      if (!noise_rng.bernoulli(start)) continue;
      const std::size_t end = std::min(length, i + static_cast<std::size_t>(noise.burst_length));
      for (std::size_t j = i; j < end; ++j) flipped[j] = 1;
    }
  }
  for (std::size_t i = 0; i < length; ++i) {
    if (flipped[i]) {
      pair.bob.flip(i);
      pair.error_positions.push_back(i);
    }
  }
  return pair;
}

NoisyKeyPair make_key_pair(BitKey alice, BitKey bob, double nominal_qber) {
  if (alice.size() != bob.size()) throw DimensionError("make_key_pair: length mismatch");
  NoisyKeyPair pair;
  pair.nominal_qber = nominal_qber;
  for (std::size_t i = 0; i < alice.size(); ++i) {
    if (alice[i] != bob[i]) pair.error_positions.push_back(i);
  }
  pair.alice = std::move(alice);
  pair.bob = std::move(bob);
  return pair;
}

QberEstimate estimate_qber(const NoisyKeyPair& pair, double sample_fraction, std::uint64_t seed) {
  if (!(sample_fraction > 0.0 && sample_fraction < 1.0)) {
    throw RangeError("estimate_qber: sample_fraction must lie in (0, 1)");
  }
  if (pair.alice.size() != pair.bob.size()) {
    throw DimensionError("estimate_qber: key lengths differ");
  }
  const std::size_t length = pair.alice.size();
  const auto count = static_cast<std::size_t>(std::floor(sample_fraction * static_cast<double>(length)));
  if (count == 0) throw RangeError("estimate_qber: sample would contain no bits");

  std::vector<std::size_t> all(length);
  std::iota(all.begin(), all.end(), std::size_t{0});
  QberEstimate out;
  out.disclosed_positions.reserve(count);
  Rng rng(derive_seed(seed, "qber-sample"));
  std::sample(all.begin(), all.end(), std::back_inserter(out.disclosed_positions), count,
              rng.engine());

  std::vector<std::uint8_t> disclosed(length, 0);
  for (auto i : out.disclosed_positions) {
    disclosed[i] = 1;
    out.mismatches += pair.alice[i] != pair.bob[i];
  }
  out.sampled_count = count;
  out.estimate = static_cast<double>(out.mismatches) / static_cast<double>(count);

  BitKey alice;
  BitKey bob;
  for (std::size_t i = 0; i < length; ++i) {
    if (disclosed[i]) continue;
    alice.push_back(pair.alice[i]);
    bob.push_back(pair.bob[i]);
  }
  out.remaining = make_key_pair(std::move(alice), std::move(bob), pair.nominal_qber);
  return out;
}

}  // namespace tpmrec
