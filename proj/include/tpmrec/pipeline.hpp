/**
 * @file pipeline.hpp
 * @brief End-to-end key distillation: raw pair, error-rate estimation, TPM reconciliation,
 *        budget planning and Toeplitz privacy amplification.
 */
#pragma once

#include <cstdint>

#include "tpmrec/channel.hpp"
#include "tpmrec/privacy.hpp"
#include "tpmrec/sync.hpp"

namespace tpmrec {

struct PipelineOptions {
  double sample_fraction = 0.1;
  double qber_threshold = 0.11;
  /// Digest termination charges 64 bits per exchange, which at desk-scale key lengths
  /// usually exceeds the budget; enable it explicitly.
  Termination termination = Termination::Oracle;
  std::int64_t digest_check_interval = 10;
  std::int64_t max_iterations = 0;  ///< 0: default_iteration_budget for the shape
  NoiseConfig noise;
  /// Count M - K*N*log2(2L+1) as known to Eve: the bit codec does not use every chunk value.
  bool count_codec_redundancy = true;
};

/// Bits charged to Eve, by stage.
struct DisclosureReport {
  std::int64_t estimation_bits = 0;      ///< sacrificed during error-rate estimation
  std::int64_t synchronization_bits = 0; ///< one bit per public output exchange (i)
  std::int64_t digest_bits = 0;          ///< termination-check digests
  std::int64_t codec_redundancy_bits = 0;

  std::int64_t total() const noexcept {
    return estimation_bits + synchronization_bits + digest_bits + codec_redundancy_bits;
  }
};

struct PipelineReport {
  NoisyKeyPair raw;
  QberEstimate estimate;
  std::size_t initial_weight_mismatches = 0;
  ReconciliationResult alice;
  ReconciliationResult bob;
  DisclosureReport disclosed;
  AmplificationBudget budget;
  ToeplitzSpec hash;
  BitKey final_alice;
  BitKey final_bob;
};

/// Throws QberAbort when the estimate exceeds the threshold, InfeasibleBudget when
/// S >= M - E, NonConvergence on budget exhaustion, and Error if the final keys differ.
PipelineReport run_pipeline(std::size_t length, double qber, const TpmParams& params,
                            int security_bits, std::uint64_t seed,
                            const PipelineOptions& options = {});

}  // namespace tpmrec
