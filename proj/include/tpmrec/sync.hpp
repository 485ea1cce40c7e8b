/**
 * @file sync.hpp
 * @brief Error correction by mutual learning of two tree parity machines.
 *
 * Alice and Bob load their raw keys into machines of identical shape, then repeat:
 * Alice draws a random input, both publish their outputs, and on agreement both apply
 * the Hebbian rule. The session ends when the weights coincide, at which point the
 * weights are converted back to (identical) key bits.
 *
 * One iteration is one input draw with output exchange, whether or not learning follows.
 * Alice's inputs come from Rng(derive_seed(config.seed, "alice-inputs")), one
 * InputVector::random draw per iteration, so a session can be replayed from its seed.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpmrec/bit_key.hpp"
#include "tpmrec/errors.hpp"
#include "tpmrec/leakage.hpp"
#include "tpmrec/tpm.hpp"

namespace tpmrec {

enum class Termination {
  /// Weights compared directly before every iteration. Used for measurement.
  Oracle,
  /// Parties exchange a 64-bit weight digest every digest_check_interval iterations.
  Digest,
};

inline constexpr int kDigestBits = 64;

struct SyncConfig {
  TpmParams params;
  std::int64_t max_iterations = 100000;
  std::int64_t digest_check_interval = 10;
  std::uint64_t seed = 0;
  Termination termination = Termination::Oracle;
  bool record_trace = false;
  std::int64_t trace_stride = 1;

  void validate() const;
};

struct SyncTranscript {
  std::int64_t iterations = 0;
  std::int64_t learning_steps = 0;
  std::int64_t digest_exchanges = 0;
  bool converged = false;
  /// Raw-key bits beyond K*N*ceil(log2(2L+1)) that were not loaded into the machine.
  std::int64_t discarded_key_bits = 0;
  /// (iteration, overlap) samples; iteration 0 is the starting state.
  std::vector<std::pair<std::int64_t, double>> overlap_trace;

  /// Bits published for termination detection.
  std::int64_t digest_bits() const noexcept { return digest_exchanges * kDigestBits; }

  /// One line of space-separated key=value fields, in this order:
  /// iterations learning_steps digest_exchanges converged discarded_key_bits trace
  /// where trace is `it:overlap` pairs joined by ';' (empty when not recorded).
  std::string to_record() const;
  static SyncTranscript from_record(const std::string& line);

  friend bool operator==(const SyncTranscript&, const SyncTranscript&) = default;
};

/// Thrown when the weights have not coincided within max_iterations.
class NonConvergence : public Error {
 public:
  explicit NonConvergence(SyncTranscript partial)
      : Error("synchronization did not converge within " + std::to_string(partial.iterations) +
              " iterations"),
        transcript_(std::move(partial)) {}

  const SyncTranscript& transcript() const noexcept { return transcript_; }

 private:
  SyncTranscript transcript_;
};

struct ReconciliationResult {
  BitKey final_key;
  SyncTranscript transcript;
  LeakageEstimate leakage;
};

/// Mutual learning on two already-built machines, updated in place.
/// Returns the transcript; converged is false if max_iterations ran out.
SyncTranscript run_mutual_learning(Tpm& alice, Tpm& bob, const SyncConfig& config);

/// Copies both machines and synchronizes the copies.
/// Throws NonConvergence (carrying the partial transcript) if max_iterations runs out.
SyncTranscript synchronize_from_weights(const Tpm& alice, const Tpm& bob, const SyncConfig& config);

/// Full three-step reconciliation: bits -> weights, mutual learning, weights -> bits.
/// Throws InsufficientMaterial for short keys and NonConvergence on budget exhaustion.
std::pair<ReconciliationResult, ReconciliationResult> reconcile(const BitKey& alice_key,
                                                                const BitKey& bob_key,
                                                                const SyncConfig& config);

/// Copy of base with exactly floor((1 - overlap) * K * N) uniformly chosen positions
/// replaced by a different uniformly chosen value. Throws RangeError unless 0 <= overlap <= 1.
Tpm seed_initial_overlap(const Tpm& base, double overlap, std::uint64_t seed);

/// Number of positions seed_initial_overlap perturbs.
std::size_t perturbed_positions(const TpmParams& params, double overlap);

/// Ten times the mean random-start iteration count over `pilots` pilot sessions.
std::int64_t default_iteration_budget(const TpmParams& params, std::uint64_t seed, int pilots = 32);

}  // namespace tpmrec
