/**
 * @file parity.hpp
 * @brief Parity-based reconciliation baselines: BBBSS and Cascade.
 *
 * Both algorithms split the (permuted) key into blocks, compare block parities over the
 * public channel and locate one error per mismatching block by binary search. A parity
 * check is one parity bit disclosed by Alice; it is the unit reported as an "iteration".
 *
 * Alice's parity of a given range is disclosed at most once per session; later queries
 * for the same range reuse the disclosed value. Only Cascade revisits ranges, when a
 * correction in a later pass is propagated back into blocks of earlier passes.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "tpmrec/bit_key.hpp"
#include "tpmrec/channel.hpp"

namespace tpmrec {

enum class ParityAlgorithm { Bbbss, Cascade };

enum class BlockSchedule {
  Fixed,     ///< every pass uses the first-pass block size
  Doubling,  ///< block size doubles after every pass
};

struct ParityConfig {
  double qber_hint = 0.0;
  int passes = 4;
  std::uint64_t seed = 0;
  ParityAlgorithm algorithm = ParityAlgorithm::Cascade;
  /// Block growth for BBBSS. Cascade always doubles.
  BlockSchedule bbbss_schedule = BlockSchedule::Fixed;
};

struct ParityOutcome {
  BitKey corrected_alice;
  BitKey corrected_bob;
  std::int64_t parity_checks = 0;
  std::int64_t disclosed_bits = 0;
  std::int64_t residual_errors = 0;
  std::int64_t first_pass_blocks = 0;
  std::vector<std::size_t> flipped_positions;  ///< in the order Bob flipped them
};

/// round-half-up(0.73 / qber), at least 1. Throws RangeError for qber <= 0.
int block_size_for(double qber);

/// Block size used in pass `pass` (0-based).
int block_size_in_pass(int first_block, int pass, ParityAlgorithm algorithm,
                       BlockSchedule bbbss_schedule);

/// Runs the configured algorithm on a copy of Bob's key. Residual errors are reported,
/// not raised. Throws RangeError if qber_hint <= 0 or passes < 1.
ParityOutcome run_parity_reconciliation(const NoisyKeyPair& pair, const ParityConfig& config);

}  // namespace tpmrec
