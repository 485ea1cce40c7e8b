#include "tpmrec/pipeline.hpp"

#include <cmath>

#include "tpmrec/errors.hpp"
#include "tpmrec/random.hpp"

namespace tpmrec {

PipelineReport run_pipeline(std::size_t length, double qber, const TpmParams& params,
                            int security_bits, std::uint64_t seed,
                            const PipelineOptions& options) {
  params.validate();
  PipelineReport report;

  report.raw = generate_key_pair(length, qber, derive_seed(seed, "raw-key"), options.noise);
  report.estimate = estimate_qber(report.raw, options.sample_fraction, derive_seed(seed, "estimate"));
  if (report.estimate.estimate > options.qber_threshold) {
    throw QberAbort("pipeline aborted: estimated QBER " + std::to_string(report.estimate.estimate) +
                        " exceeds threshold " + std::to_string(options.qber_threshold),
                    report.estimate.estimate, options.qber_threshold);
  }

  const BitKey& alice_raw = report.estimate.remaining_alice();
  const BitKey& bob_raw = report.estimate.remaining_bob();
  report.initial_weight_mismatches =
      weight_mismatches(bits_to_weights(alice_raw, params), bits_to_weights(bob_raw, params));

  SyncConfig sync;
  sync.params = params;
  sync.seed = derive_seed(seed, "sync");
  sync.termination = options.termination;
  sync.digest_check_interval = options.digest_check_interval;
  sync.max_iterations = options.max_iterations > 0
                            ? options.max_iterations
                            : default_iteration_budget(params, derive_seed(seed, "budget"));
  auto [alice, bob] = reconcile(alice_raw, bob_raw, sync);
  report.alice = std::move(alice);
  report.bob = std::move(bob);

  const auto reconciled = static_cast<std::int64_t>(report.alice.final_key.size());
  report.disclosed.estimation_bits = static_cast<std::int64_t>(report.estimate.sampled_count);
  report.disclosed.synchronization_bits = report.alice.leakage.recommended_bit_reduction;
  report.disclosed.digest_bits = report.alice.transcript.digest_bits();
  if (options.count_codec_redundancy) {
    report.disclosed.codec_redundancy_bits = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(reconciled) - key_space_log2(params) - 1e-9));
  }

  const std::int64_t other_disclosed = report.disclosed.estimation_bits +
                                       report.disclosed.digest_bits +
                                       report.disclosed.codec_redundancy_bits;
  report.budget = plan_budget(reconciled, report.alice.leakage, other_disclosed, security_bits);

  report.hash = ToeplitzSpec::generate(static_cast<std::size_t>(report.budget.final_bits),
                                       static_cast<std::size_t>(reconciled),
                                       derive_seed(seed, "hash"));
  report.final_alice = amplify(report.alice.final_key, report.hash);
  report.final_bob = amplify(report.bob.final_key, report.hash);
  if (report.final_alice != report.final_bob) {
    throw Error("pipeline: final keys differ after reconciliation");
  }
  return report;
}

}  // namespace tpmrec
