#include <doctest.h>

#include <algorithm>
#include <set>

#include "tpmrec/errors.hpp"
#include "tpmrec/parity.hpp"

using namespace tpmrec;

namespace {

ParityConfig config(ParityAlgorithm algorithm, double qber, std::uint64_t seed, int passes = 4) {
  ParityConfig c;
  c.algorithm = algorithm;
  c.qber_hint = qber;
  c.seed = seed;
  c.passes = passes;
  return c;
}

}  // namespace

TEST_CASE("block_size_for") {
  CHECK(block_size_for(0.05) == 15);  // 14.6
  CHECK(block_size_for(0.03) == 24);  // 24.33
  CHECK(block_size_for(0.73) == 1);
  CHECK(block_size_for(0.9) == 1);    // 0.81 rounds to 1
  CHECK(block_size_for(0.292) == 3);  // 2.5 rounds half up
  CHECK_THROWS_AS(block_size_for(0.0), RangeError);
  CHECK_THROWS_AS(block_size_for(-0.1), RangeError);
}

TEST_CASE("block schedules") {
  CHECK(block_size_in_pass(15, 0, ParityAlgorithm::Cascade, BlockSchedule::Fixed) == 15);
  CHECK(block_size_in_pass(15, 3, ParityAlgorithm::Cascade, BlockSchedule::Fixed) == 120);
  CHECK(block_size_in_pass(15, 3, ParityAlgorithm::Bbbss, BlockSchedule::Fixed) == 15);
  CHECK(block_size_in_pass(15, 3, ParityAlgorithm::Bbbss, BlockSchedule::Doubling) == 120);
}

TEST_CASE("error-free pair costs one check per top-level block") {
  const auto pair = generate_key_pair(500, 0.0, 1);
  for (auto algorithm : {ParityAlgorithm::Bbbss, ParityAlgorithm::Cascade}) {
    const auto one = run_parity_reconciliation(pair, config(algorithm, 0.05, 2, 1));
    CHECK(one.parity_checks == 34);  // ceil(500 / 15), last block has 5 bits
    CHECK(one.first_pass_blocks == 34);
    CHECK(one.residual_errors == 0);
    CHECK(one.flipped_positions.empty());
  }
  // Four passes: BBBSS keeps 15-bit blocks, Cascade uses 15, 30, 60, 120.
  CHECK(run_parity_reconciliation(pair, config(ParityAlgorithm::Bbbss, 0.05, 2)).parity_checks == 4 * 34);
  CHECK(run_parity_reconciliation(pair, config(ParityAlgorithm::Cascade, 0.05, 2)).parity_checks ==
        34 + 17 + 9 + 5);
}

TEST_CASE("argument checks") {
  const auto pair = generate_key_pair(100, 0.05, 1);
  CHECK_THROWS_AS(run_parity_reconciliation(pair, config(ParityAlgorithm::Cascade, 0.0, 1)), RangeError);
  CHECK_THROWS_AS(run_parity_reconciliation(pair, config(ParityAlgorithm::Cascade, 0.05, 1, 0)), RangeError);
}

TEST_CASE("property: every flip corrects a genuine error, once") {
  for (auto algorithm : {ParityAlgorithm::Bbbss, ParityAlgorithm::Cascade}) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const double qber = seed % 2 ? 0.05 : 0.03;
      const auto pair = generate_key_pair(seed % 3 ? 500 : 601, qber, seed);
      const auto out = run_parity_reconciliation(pair, config(algorithm, qber, seed + 1));
      const std::set<std::size_t> errors(pair.error_positions.begin(), pair.error_positions.end());
      const std::set<std::size_t> flipped(out.flipped_positions.begin(), out.flipped_positions.end());
      REQUIRE(flipped.size() == out.flipped_positions.size());
      REQUIRE(std::includes(errors.begin(), errors.end(), flipped.begin(), flipped.end()));
      CHECK(out.residual_errors == static_cast<std::int64_t>(errors.size() - flipped.size()));
      CHECK(out.disclosed_bits == out.parity_checks);
      CHECK(out.parity_checks >= out.first_pass_blocks);
      CHECK(out.corrected_alice == pair.alice);
      CHECK(static_cast<std::int64_t>(out.corrected_bob.hamming_distance(pair.alice)) == out.residual_errors);
    }
  }
}

TEST_CASE("burst errors are corrected too") {
  NoiseConfig noise;
  noise.model = ErrorModel::Burst;
  noise.burst_length = 3;
  int residual_runs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto pair = generate_key_pair(600, 0.03, seed, noise);
    residual_runs += run_parity_reconciliation(pair, config(ParityAlgorithm::Cascade, 0.03, seed)).residual_errors > 0;
  }
  CHECK(residual_runs <= 10);
}

TEST_CASE("Cascade needs fewer checks than BBBSS on average") {
  double bbbss = 0.0;
  double cascade = 0.0;
  int cascade_residual = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto pair = generate_key_pair(500, 0.05, 10000 + seed);
    bbbss += run_parity_reconciliation(pair, config(ParityAlgorithm::Bbbss, 0.05, seed)).parity_checks;
    const auto c = run_parity_reconciliation(pair, config(ParityAlgorithm::Cascade, 0.05, seed));
    cascade += c.parity_checks;
    cascade_residual += c.residual_errors > 0;
  }
  CHECK(cascade < bbbss);
  CHECK(cascade_residual <= 10);
}

TEST_CASE("deterministic under seed") {
  const auto pair = generate_key_pair(500, 0.05, 3);
  const auto a = run_parity_reconciliation(pair, config(ParityAlgorithm::Cascade, 0.05, 4));
  const auto b = run_parity_reconciliation(pair, config(ParityAlgorithm::Cascade, 0.05, 4));
  CHECK(a.parity_checks == b.parity_checks);
  CHECK(a.flipped_positions == b.flipped_positions);
}
