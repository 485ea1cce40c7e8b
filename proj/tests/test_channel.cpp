#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "tpmrec/channel.hpp"
#include "tpmrec/errors.hpp"

using namespace tpmrec;

TEST_CASE("generate_key_pair: zero noise gives identical keys") {
  const auto pair = generate_key_pair(1000, 0.0, 5);
  CHECK(pair.alice == pair.bob);
  CHECK(pair.error_positions.empty());
  CHECK(pair.alice.size() == 1000);
}

TEST_CASE("generate_key_pair: flip fraction within 3 sigma of the nominal rate") {
  const double sigma = oracle::proportion_sigma(0.03, 10000);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 42ULL, 1234ULL}) {
    const auto pair = generate_key_pair(10000, 0.03, seed);
    const double observed = static_cast<double>(pair.error_positions.size()) / 10000.0;
    CHECK(std::abs(observed - 0.03) <= 3 * sigma);
  }
}

TEST_CASE("generate_key_pair: deterministic and error set exact") {
  const auto a = generate_key_pair(2000, 0.1, 77);
  const auto b = generate_key_pair(2000, 0.1, 77);
  CHECK(a.alice == b.alice);
  CHECK(a.bob == b.bob);
  CHECK(a.error_positions == b.error_positions);
  CHECK(generate_key_pair(2000, 0.1, 78).alice != a.alice);

  std::vector<std::size_t> differ;
  for (std::size_t i = 0; i < a.alice.size(); ++i) {
    if (a.alice[i] != a.bob[i]) differ.push_back(i);
  }
  CHECK(differ == a.error_positions);
}

TEST_CASE("generate_key_pair: argument checks") {
  CHECK_THROWS_AS(generate_key_pair(10, -0.01, 1), RangeError);
  CHECK_THROWS_AS(generate_key_pair(10, 0.51, 1), RangeError);
  CHECK_THROWS_AS(generate_key_pair(0, 0.1, 1), RangeError);
  CHECK_NOTHROW(generate_key_pair(10, 0.5, 1));
}

TEST_CASE("generate_key_pair: burst mode clusters errors") {
  NoiseConfig noise;
  noise.model = ErrorModel::Burst;
  noise.burst_length = 5;
  const auto pair = generate_key_pair(50000, 0.02, 9, noise);
  const auto& e = pair.error_positions;
  REQUIRE(!e.empty());
  std::size_t runs = 1;
  for (std::size_t i = 1; i < e.size(); ++i) runs += e[i] != e[i - 1] + 1;
  const double mean_run = static_cast<double>(e.size()) / static_cast<double>(runs);
  CHECK(mean_run > 3.0);
  const double rate = static_cast<double>(e.size()) / 50000.0;
  CHECK(rate == doctest::Approx(0.02).epsilon(0.2));
}

TEST_CASE("estimate_qber: identical keys estimate zero") {
  const auto est = estimate_qber(generate_key_pair(500, 0.0, 1), 0.1, 2);
  CHECK(est.sampled_count == 50);
  CHECK(est.mismatches == 0);
  CHECK(est.estimate == 0.0);
}

TEST_CASE("estimate_qber: ratio on a sample with a known number of mismatches") {
  const auto clean = generate_key_pair(1000, 0.0, 3);
  const auto probe = estimate_qber(clean, 0.1, 99);
  REQUIRE(probe.sampled_count == 100);

  // Plant errors at exactly five sampled positions plus some outside the sample.
  BitKey bob = clean.alice;
  for (std::size_t i = 0; i < 5; ++i) bob.flip(probe.disclosed_positions[i * 7]);
  std::size_t planted_outside = 0;
  for (std::size_t i = 0; i < bob.size() && planted_outside < 10; ++i) {
    if (!std::binary_search(probe.disclosed_positions.begin(), probe.disclosed_positions.end(), i)) {
      bob.flip(i);
      ++planted_outside;
    }
  }
  const auto pair = make_key_pair(clean.alice, bob);
  const auto est = estimate_qber(pair, 0.1, 99);
  CHECK(est.disclosed_positions == probe.disclosed_positions);
  CHECK(est.mismatches == 5);
  CHECK(est.estimate == doctest::Approx(0.05));
  CHECK(est.remaining.error_positions.size() == 10);
}

TEST_CASE("estimate_qber: disclosed positions are removed from both keys") {
  const auto pair = generate_key_pair(777, 0.05, 4);
  const auto est = estimate_qber(pair, 0.25, 5);
  CHECK(est.sampled_count == 194);
  CHECK(est.remaining_alice().size() == 777 - 194);
  CHECK(est.remaining_bob().size() == 777 - 194);
  CHECK(std::is_sorted(est.disclosed_positions.begin(), est.disclosed_positions.end()));
  CHECK(std::adjacent_find(est.disclosed_positions.begin(), est.disclosed_positions.end()) ==
        est.disclosed_positions.end());

  BitKey expected_alice;
  BitKey expected_bob;
  for (std::size_t i = 0; i < 777; ++i) {
    if (std::binary_search(est.disclosed_positions.begin(), est.disclosed_positions.end(), i)) continue;
    expected_alice.push_back(pair.alice[i]);
    expected_bob.push_back(pair.bob[i]);
  }
  CHECK(est.remaining_alice() == expected_alice);
  CHECK(est.remaining_bob() == expected_bob);
}

TEST_CASE("estimate_qber: argument checks") {
  const auto pair = generate_key_pair(20, 0.1, 1);
  CHECK_THROWS_AS(estimate_qber(pair, 0.0, 1), RangeError);
  CHECK_THROWS_AS(estimate_qber(pair, 1.0, 1), RangeError);
  CHECK_THROWS_AS(estimate_qber(pair, 0.01, 1), RangeError);  // floor(0.2) = 0 bits
}

TEST_CASE("estimate_qber: mean estimate converges to the nominal rate") {
  const int seeds = 400;
  double sum = 0.0;
  std::size_t sampled = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto pair = generate_key_pair(2000, 0.04, 1000 + s);
    const auto est = estimate_qber(pair, 0.1, 5000 + s);
    sum += est.estimate;
    sampled += est.sampled_count;
  }
  const double mean = sum / seeds;
  // Each estimate is a proportion of 200 bits; the mean pools all samples.
  CHECK(std::abs(mean - 0.04) <= 3 * oracle::proportion_sigma(0.04, static_cast<double>(sampled)));
}
