/**
 * @file adversary.hpp
 * @brief Eavesdroppers on a mutual-learning session.
 *
 * Eve sees every public input and both outputs. Learning events:
 *   tau_A != tau_B            -> nobody learns
 *   tau_A == tau_B != tau_E   -> only Alice and Bob learn (passive Eve),
 *                                or Eve first flips the hidden unit with the weakest
 *                                local field and then learns (geometric Eve)
 *   tau_A == tau_B == tau_E   -> all machines learn
 */
#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tpmrec/sync.hpp"
#include "tpmrec/tpm.hpp"

namespace tpmrec {

enum class AttackStrategy { Passive, Geometric, Ensemble };

struct AttackConfig {
  AttackStrategy strategy = AttackStrategy::Passive;
  int ensemble_size = 1;
  /// Eve keeps observing until at least this many iterations, even after Alice and Bob
  /// have synchronized (their outputs keep agreeing). 0 stops observation at their
  /// synchronization.
  std::int64_t iteration_budget = 1000;
  /// Partially informed Eve: start from Alice's weights at this overlap instead of
  /// uniformly random weights.
  std::optional<double> eve_initial_overlap;

  void validate() const;
};

struct AttackResult {
  double best_overlap = 0.0;  ///< final overlap of the best Eve with Alice
  bool synced = false;        ///< best_overlap == 1.0
  std::int64_t iterations_observed = 0;
  std::vector<double> per_machine_overlap;
  /// Best Eve overlap with Alice at the iteration Alice and Bob synchronized (-1 if never).
  double overlap_at_partner_sync = -1.0;
  /// Earliest iteration at which some Eve matched Alice exactly (-1 if never).
  std::int64_t first_sync_iteration = -1;
  /// Learning steps over the observation window.
  std::vector<std::int64_t> eve_learning_steps;
  std::int64_t partner_learning_steps = 0;
};

/// Runs Alice/Bob mutual learning with Eve(s) listening. Alice and Bob's transcript
/// covers the iterations up to their synchronization (or max_iterations). The session
/// is deterministic given config.seed. Throws DimensionError on shape mismatch.
std::pair<SyncTranscript, AttackResult> run_attack(const Tpm& alice, const Tpm& bob,
                                                   const SyncConfig& config,
                                                   const AttackConfig& attack);

/// As run_attack, but leaves Alice's and Bob's final machines in place.
std::pair<SyncTranscript, AttackResult> run_attack_in_place(Tpm& alice, Tpm& bob,
                                                            const SyncConfig& config,
                                                            const AttackConfig& attack);

}  // namespace tpmrec
