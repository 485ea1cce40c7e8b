#include "tpmrec/parity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "tpmrec/errors.hpp"
#include "tpmrec/random.hpp"

namespace tpmrec {

int block_size_for(double qber) {
  if (!(qber > 0.0)) throw RangeError("block_size_for: qber must be > 0");
  const double k = std::floor(0.73 / qber + 0.5);
  return std::max(1, static_cast<int>(k));
}

int block_size_in_pass(int first_block, int pass, ParityAlgorithm algorithm,
                       BlockSchedule bbbss_schedule) {
  const bool doubling =
      algorithm == ParityAlgorithm::Cascade || bbbss_schedule == BlockSchedule::Doubling;
  if (!doubling) return first_block;
  // Saturate well above any realistic key length.
  const int shift = std::min(pass, 24);
  const long long size = static_cast<long long>(first_block) << shift;
  return static_cast<int>(std::min<long long>(size, 1LL << 30));
}

namespace {

class ParitySession {
 public:
  ParitySession(const NoisyKeyPair& pair, const ParityConfig& config)
      : alice_(pair.alice), bob_(pair.bob), config_(config), n_(pair.alice.size()) {}

  ParityOutcome run() {
    const int first = block_size_for(config_.qber_hint);
    for (int pass = 0; pass < config_.passes; ++pass) {
      add_pass(pass);
      const auto block = static_cast<std::size_t>(
          block_size_in_pass(first, pass, config_.algorithm, config_.bbbss_schedule));
      block_sizes_.push_back(block);
      for (std::size_t lo = 0; lo < n_; lo += block) {
        const std::size_t hi = std::min(n_, lo + block);
        if (pass == 0) ++outcome_.first_pass_blocks;
        if (alice_parity(pass, lo, hi) == bob_parity(pass, lo, hi)) continue;
        const std::size_t fixed = locate_and_flip(pass, lo, hi);
        if (config_.algorithm == ParityAlgorithm::Cascade && pass > 0) {
          back_propagate(fixed, pass);
        }
      }
    }
    outcome_.corrected_alice = alice_;
    outcome_.corrected_bob = bob_;
    outcome_.disclosed_bits = outcome_.parity_checks;
    outcome_.residual_errors = static_cast<std::int64_t>(alice_.hamming_distance(bob_));
    return std::move(outcome_);
  }

 private:
  void add_pass(int pass) {
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (pass > 0) {
      Rng rng(derive_seed(derive_seed(config_.seed, "parity-permutation"),
                          static_cast<std::uint64_t>(pass)));
      std::shuffle(order.begin(), order.end(), rng.engine());
    }
    std::vector<std::size_t> where(n_);
    for (std::size_t i = 0; i < n_; ++i) where[order[i]] = i;
    orders_.push_back(std::move(order));
    where_.push_back(std::move(where));
  }

  // Alice's parity over order[pass][lo, hi); disclosed once, then remembered.
  std::uint8_t alice_parity(int pass, std::size_t lo, std::size_t hi) {
    const auto key = std::make_tuple(pass, lo, hi);
    if (auto it = disclosed_.find(key); it != disclosed_.end()) return it->second;
    ++outcome_.parity_checks;
    const std::uint8_t p = parity_of(alice_, pass, lo, hi);
    disclosed_.emplace(key, p);
    return p;
  }

  std::uint8_t bob_parity(int pass, std::size_t lo, std::size_t hi) const {
    return parity_of(bob_, pass, lo, hi);
  }

  std::uint8_t parity_of(const BitKey& key, int pass, std::size_t lo, std::size_t hi) const {
    const auto& order = orders_[pass];
    std::uint8_t p = 0;
    for (std::size_t i = lo; i < hi; ++i) p ^= key[order[i]];
    return p;
  }

  // Binary search on a block with odd parity difference: compare the first half, infer
  // the second.
  std::size_t locate_and_flip(int pass, std::size_t lo, std::size_t hi) {
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (alice_parity(pass, lo, mid) != bob_parity(pass, lo, mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const std::size_t pos = orders_[pass][lo];
    bob_.flip(pos);
    outcome_.flipped_positions.push_back(pos);
    return pos;
  }

  // Every correction changes the parity of one block in each pass run so far; any block
  // that now mismatches holds another error.
  void back_propagate(std::size_t first_fix, int current_pass) {
    std::vector<std::size_t> pending{first_fix};
    while (!pending.empty()) {
      const std::size_t pos = pending.back();
      pending.pop_back();
      for (int pass = 0; pass <= current_pass; ++pass) {
        const std::size_t block = block_sizes_[pass];
        const std::size_t lo = where_[pass][pos] / block * block;
        const std::size_t hi = std::min(n_, lo + block);
        if (alice_parity(pass, lo, hi) != bob_parity(pass, lo, hi)) {
          pending.push_back(locate_and_flip(pass, lo, hi));
        }
      }
    }
  }

  const BitKey& alice_;
  BitKey bob_;
  const ParityConfig& config_;
  const std::size_t n_;
  std::vector<std::vector<std::size_t>> orders_;
  std::vector<std::vector<std::size_t>> where_;
  std::vector<std::size_t> block_sizes_;
  std::map<std::tuple<int, std::size_t, std::size_t>, std::uint8_t> disclosed_;
  ParityOutcome outcome_;
};

}  // namespace

ParityOutcome run_parity_reconciliation(const NoisyKeyPair& pair, const ParityConfig& config) {
  if (!(config.qber_hint > 0.0)) {
    throw RangeError("run_parity_reconciliation: qber_hint must be > 0");
  }
  if (config.passes < 1) throw RangeError("run_parity_reconciliation: passes must be >= 1");
  if (pair.alice.size() != pair.bob.size()) {
    throw DimensionError("run_parity_reconciliation: key lengths differ");
  }
  return ParitySession(pair, config).run();
}

}  // namespace tpmrec
