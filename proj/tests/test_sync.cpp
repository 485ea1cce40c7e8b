#include <doctest.h>

#include <numeric>

#include "tpmrec/channel.hpp"
#include "tpmrec/errors.hpp"
#include "tpmrec/sync.hpp"

using namespace tpmrec;

namespace {

SyncConfig config_for(const TpmParams& p, std::uint64_t seed) {
  SyncConfig c;
  c.params = p;
  c.seed = seed;
  c.max_iterations = 100000;
  return c;
}

std::pair<Tpm, Tpm> random_pair(const TpmParams& p, std::uint64_t seed) {
  Rng rng(seed);
  Tpm a = Tpm::random(p, rng);
  Tpm b = Tpm::random(p, rng);
  return {a, b};
}

}  // namespace

TEST_CASE("config validation") {
  SyncConfig c = config_for({2, 2, 1}, 1);
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), RangeError);
  c.max_iterations = 10;
  c.digest_check_interval = 0;
  CHECK_THROWS_AS(c.validate(), RangeError);
}

TEST_CASE("identical start converges without learning (oracle termination)") {
  const TpmParams p{6, 8, 2};
  Rng rng(3);
  const Tpm a = Tpm::random(p, rng);
  const auto t = synchronize_from_weights(a, a, config_for(p, 1));
  CHECK(t.converged);
  CHECK(t.iterations == 0);
  CHECK(t.learning_steps == 0);
}

TEST_CASE("identical keys in protocol mode stop after one digest interval") {
  const TpmParams p{4, 5, 2};
  const auto pair = generate_key_pair(codec_bits(p) + 7, 0.0, 9);
  SyncConfig c = config_for(p, 2);
  c.termination = Termination::Digest;
  c.digest_check_interval = 10;
  const auto [ra, rb] = reconcile(pair.alice, pair.bob, c);
  CHECK(ra.transcript.converged);
  CHECK(ra.transcript.iterations == 10);
  CHECK(ra.transcript.digest_exchanges == 1);
  CHECK(ra.transcript.digest_bits() == 64);
  CHECK(ra.transcript.discarded_key_bits == 7);
  CHECK(ra.final_key == rb.final_key);
}

TEST_CASE("reconcile corrects differing keys") {
  const TpmParams p{5, 10, 2};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pair = generate_key_pair(codec_bits(p), 0.05, seed);
    const auto [ra, rb] = reconcile(pair.alice, pair.bob, config_for(p, seed));
    REQUIRE(ra.transcript.converged);
    CHECK(ra.final_key == rb.final_key);
    CHECK(ra.final_key.size() == codec_bits(p));
    CHECK(ra.transcript.learning_steps <= ra.transcript.iterations);
    CHECK(ra.leakage.iterations == ra.transcript.iterations);
  }
}

TEST_CASE("reconcile: short or unequal keys") {
  const TpmParams p{2, 2, 2};
  CHECK_THROWS_AS(reconcile(BitKey(11), BitKey(11), config_for(p, 1)), InsufficientMaterial);
  CHECK_THROWS_AS(reconcile(BitKey(12), BitKey(13), config_for(p, 1)), DimensionError);
}

TEST_CASE("non-convergence carries the partial transcript") {
  const TpmParams p{6, 8, 2};
  auto [a, b] = random_pair(p, 4);
  SyncConfig c = config_for(p, 5);
  c.max_iterations = 3;
  try {
    synchronize_from_weights(a, b, c);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.transcript().iterations == 3);
    CHECK_FALSE(e.transcript().converged);
  }
}

TEST_CASE("learning happens exactly on output agreement (replay)") {
  const TpmParams p{3, 4, 2};
  auto [a0, b0] = random_pair(p, 12);
  SyncConfig c = config_for(p, 13);
  c.max_iterations = 200;

  Tpm a = a0;
  Tpm b = b0;
  const SyncTranscript t = run_mutual_learning(a, b, c);

  // Replay with the documented input stream and count agreements by hand.
  Tpm ra = a0;
  Tpm rb = b0;
  Rng inputs(derive_seed(c.seed, "alice-inputs"));
  std::int64_t agreements = 0;
  for (std::int64_t it = 0; it < t.iterations; ++it) {
    const InputVector x = InputVector::random(p, inputs);
    const auto ea = evaluate(ra, x);
    const auto eb = evaluate(rb, x);
    if (ea.tau != eb.tau) continue;
    ++agreements;
    apply_hebbian(ra, x, ea, eb.tau);
    apply_hebbian(rb, x, eb, ea.tau);
  }
  CHECK(agreements == t.learning_steps);
  CHECK(ra == a);
  CHECK(rb == b);
}

TEST_CASE("deterministic replay") {
  const TpmParams p{6, 8, 2};
  auto [a, b] = random_pair(p, 21);
  SyncConfig c = config_for(p, 22);
  c.record_trace = true;
  CHECK(synchronize_from_weights(a, b, c) == synchronize_from_weights(a, b, c));
  c.termination = Termination::Digest;
  CHECK(synchronize_from_weights(a, b, c) == synchronize_from_weights(a, b, c));
}

TEST_CASE("overlap trace rises on average") {
  const TpmParams p{6, 8, 2};
  const int trials = 300;
  const std::int64_t horizon = 150;
  std::vector<double> mean(horizon + 1, 0.0);
  for (int trial = 0; trial < trials; ++trial) {
    auto [a, b] = random_pair(p, 100 + trial);
    SyncConfig c = config_for(p, 500 + trial);
    c.record_trace = true;
    const auto t = synchronize_from_weights(a, b, c);
    // After convergence the overlap stays at 1.
    std::vector<double> series(horizon + 1, 1.0);
    for (const auto& [it, ov] : t.overlap_trace) {
      if (it <= horizon) series[it] = ov;
    }
    CHECK(t.overlap_trace.back().second == 1.0);
    for (std::int64_t i = 0; i <= horizon; ++i) mean[i] += series[i] / trials;
  }
  // Individual steps may repel; averaged over windows the trend is upward.
  for (std::int64_t start = 0; start + 60 <= horizon; start += 30) {
    const double early = std::accumulate(mean.begin() + start, mean.begin() + start + 30, 0.0);
    const double late = std::accumulate(mean.begin() + start + 30, mean.begin() + start + 60, 0.0);
    CHECK(late > early);
  }
}

TEST_CASE("seed_initial_overlap") {
  const TpmParams p{10, 25, 2};
  Rng rng(5);
  const Tpm base = Tpm::random(p, rng);

  CHECK(seed_initial_overlap(base, 1.0, 1) == base);
  CHECK(perturbed_positions(p, 0.95) == 12);
  CHECK(perturbed_positions(TpmParams{10, 30, 2}, 0.97) == 9);
  CHECK(perturbed_positions(p, 0.0) == 250);
  CHECK_THROWS_AS(seed_initial_overlap(base, 1.5, 1), RangeError);
  CHECK_THROWS_AS(seed_initial_overlap(base, -0.1, 1), RangeError);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Tpm other = seed_initial_overlap(base, 0.95, seed);
    // Every perturbed position really differs, so the mismatch count is exact.
    REQUIRE(weight_mismatches(base, other) == 12);
  }
  CHECK(weight_mismatches(base, seed_initial_overlap(base, 0.0, 3)) == 250);
}

TEST_CASE("monotone difficulty at a small shape") {
  const TpmParams p{4, 10, 2};
  double random_total = 0.0;
  double near_total = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    auto [a, b] = random_pair(p, 900 + trial);
    random_total += synchronize_from_weights(a, b, config_for(p, trial)).iterations;
    const Tpm near = seed_initial_overlap(a, 0.95, trial);
    near_total += synchronize_from_weights(a, near, config_for(p, trial)).iterations;
  }
  CHECK(near_total < random_total);
}

TEST_CASE("transcript record round trip") {
  const TpmParams p{3, 5, 2};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto [a, b] = random_pair(p, seed);
    SyncConfig c = config_for(p, seed);
    c.record_trace = seed % 2 == 0;
    c.trace_stride = 3;
    const auto t = synchronize_from_weights(a, b, c);
    CHECK(SyncTranscript::from_record(t.to_record()) == t);
  }
  CHECK_THROWS_AS(SyncTranscript::from_record("iterations=1 converged=1"), ConfigError);
  CHECK(SyncTranscript{}.to_record() ==
        "iterations=0 learning_steps=0 digest_exchanges=0 converged=0 discarded_key_bits=0 trace=");
}

TEST_CASE("default iteration budget") {
  const TpmParams p{6, 8, 2};
  const auto budget = default_iteration_budget(p, 1);
  CHECK(budget >= 1000);
  CHECK(budget == default_iteration_budget(p, 1));
}
