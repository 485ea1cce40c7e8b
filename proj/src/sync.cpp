#include "tpmrec/sync.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tpmrec/random.hpp"

namespace tpmrec {

void SyncConfig::validate() const {
  params.validate();
  if (max_iterations < 1) throw RangeError("SyncConfig: max_iterations must be >= 1");
  if (digest_check_interval < 1) {
    throw RangeError("SyncConfig: digest_check_interval must be >= 1");
  }
  if (trace_stride < 1) throw RangeError("SyncConfig: trace_stride must be >= 1");
}

SyncTranscript run_mutual_learning(Tpm& alice, Tpm& bob, const SyncConfig& config) {
  config.validate();
  if (alice.params() != config.params || bob.params() != config.params) {
    throw DimensionError("synchronize: machine shape differs from SyncConfig.params");
  }

  SyncTranscript t;
  Rng inputs(derive_seed(config.seed, "alice-inputs"));
  const bool oracle = config.termination == Termination::Oracle;
  if (config.record_trace) t.overlap_trace.emplace_back(0, weight_overlap(alice, bob));

  while (true) {
    if (oracle && alice == bob) {
      t.converged = true;
      break;
    }
    if (t.iterations >= config.max_iterations) break;

    ++t.iterations;
    const InputVector x = InputVector::random(config.params, inputs);
    const TpmEvaluation ea = evaluate(alice, x);
    const TpmEvaluation eb = evaluate(bob, x);
    if (ea.tau == eb.tau) {
      apply_hebbian(alice, x, ea, eb.tau);
      apply_hebbian(bob, x, eb, ea.tau);
      ++t.learning_steps;
    }
    if (config.record_trace && t.iterations % config.trace_stride == 0) {
      t.overlap_trace.emplace_back(t.iterations, weight_overlap(alice, bob));
    }
    if (!oracle && t.iterations % config.digest_check_interval == 0) {
      ++t.digest_exchanges;
      if (alice.digest() == bob.digest()) {
        t.converged = true;
        break;
      }
    }
  }

  if (config.record_trace && t.converged &&
      (t.overlap_trace.empty() || t.overlap_trace.back().first != t.iterations)) {
    t.overlap_trace.emplace_back(t.iterations, weight_overlap(alice, bob));
  }
  return t;
}

SyncTranscript synchronize_from_weights(const Tpm& alice, const Tpm& bob,
                                        const SyncConfig& config) {
  Tpm a = alice;
  Tpm b = bob;
  SyncTranscript t = run_mutual_learning(a, b, config);
  if (!t.converged) throw NonConvergence(std::move(t));
  return t;
}

std::pair<ReconciliationResult, ReconciliationResult> reconcile(const BitKey& alice_key,
                                                                const BitKey& bob_key,
                                                                const SyncConfig& config) {
  if (alice_key.size() != bob_key.size()) {
    throw DimensionError("reconcile: raw keys differ in length");
  }
  Tpm alice = bits_to_weights(alice_key, config.params);
  Tpm bob = bits_to_weights(bob_key, config.params);

  SyncTranscript t = run_mutual_learning(alice, bob, config);
  t.discarded_key_bits = static_cast<std::int64_t>(alice_key.size() - codec_bits(config.params));
  if (!t.converged) throw NonConvergence(std::move(t));

  const LeakageEstimate leak = leakage_after(t.iterations, config.params);
  ReconciliationResult ra{weights_to_bits(alice), t, leak};
  ReconciliationResult rb{weights_to_bits(bob), t, leak};
  return {std::move(ra), std::move(rb)};
}

std::size_t perturbed_positions(const TpmParams& params, double overlap) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw RangeError("seed_initial_overlap: overlap must lie in [0, 1]");
  }
  // The epsilon absorbs representation error such as (1 - 0.97) * 300 = 8.999...
  const double raw = (1.0 - overlap) * static_cast<double>(params.weight_count());
  return std::min(params.weight_count(), static_cast<std::size_t>(std::floor(raw + 1e-9)));
}

Tpm seed_initial_overlap(const Tpm& base, double overlap, std::uint64_t seed) {
  const auto& p = base.params();
  const std::size_t count = perturbed_positions(p, overlap);
  Rng rng(derive_seed(seed, "overlap-perturbation"));

  std::vector<std::size_t> all(p.weight_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), count, rng.engine());

  Tpm out = base;
  for (auto i : chosen) {
    const int original = base.weights()[i];
    // Uniform over the 2L values different from the original.
    int v = rng.uniform_int(-p.weight_bound, p.weight_bound - 1);
    if (v >= original) ++v;
    out.set_weight(i, v);
  }
  return out;
}

std::int64_t default_iteration_budget(const TpmParams& params, std::uint64_t seed, int pilots) {
  params.validate();
  if (pilots < 1) throw RangeError("default_iteration_budget: pilots must be >= 1");
  SyncConfig cfg;
  cfg.params = params;
  cfg.max_iterations = 10'000'000;
  double total = 0.0;
  for (int i = 0; i < pilots; ++i) {
    const std::uint64_t s = derive_seed(derive_seed(seed, "pilot"), static_cast<std::uint64_t>(i));
    Rng rng(s);
    Tpm a = Tpm::random(params, rng);
    Tpm b = Tpm::random(params, rng);
    cfg.seed = s;
    total += static_cast<double>(run_mutual_learning(a, b, cfg).iterations);
  }
  const auto budget = static_cast<std::int64_t>(std::ceil(10.0 * total / pilots));
  return std::max<std::int64_t>(budget, 1000);
}

std::string SyncTranscript::to_record() const {
  std::ostringstream os;
  os.precision(17);
  os << "iterations=" << iterations << " learning_steps=" << learning_steps
     << " digest_exchanges=" << digest_exchanges << " converged=" << (converged ? 1 : 0)
     << " discarded_key_bits=" << discarded_key_bits << " trace=";
  for (std::size_t i = 0; i < overlap_trace.size(); ++i) {
    if (i) os << ';';
    os << overlap_trace[i].first << ':' << overlap_trace[i].second;
  }
  return os.str();
}

SyncTranscript SyncTranscript::from_record(const std::string& line) {
  static constexpr const char* kFields[] = {"iterations",       "learning_steps",
                                            "digest_exchanges", "converged",
                                            "discarded_key_bits", "trace"};
  SyncTranscript t;
  std::istringstream is(line);
  std::string token;
  std::size_t index = 0;
  while (is >> token) {
    if (index >= std::size(kFields)) throw ConfigError("transcript record: too many fields");
    const auto eq = token.find('=');
    if (eq == std::string::npos || token.substr(0, eq) != kFields[index]) {
      throw ConfigError("transcript record: expected field '" + std::string(kFields[index]) + "'");
    }
    const std::string value = token.substr(eq + 1);
    try {
      switch (index) {
        case 0: t.iterations = std::stoll(value); break;
        case 1: t.learning_steps = std::stoll(value); break;
        case 2: t.digest_exchanges = std::stoll(value); break;
        case 3: t.converged = std::stoi(value) != 0; break;
        case 4: t.discarded_key_bits = std::stoll(value); break;
        case 5: {
          std::istringstream ts(value);
          std::string pair;
          while (std::getline(ts, pair, ';')) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos) throw ConfigError("transcript record: bad trace entry");
            t.overlap_trace.emplace_back(std::stoll(pair.substr(0, colon)),
                                         std::stod(pair.substr(colon + 1)));
          }
          break;
        }
      }
    } catch (const std::logic_error&) {
      throw ConfigError("transcript record: bad value for '" + std::string(kFields[index]) + "'");
    }
    ++index;
  }
  // An empty trace leaves the last token as "trace=", which still counts.
  if (index != std::size(kFields)) throw ConfigError("transcript record: missing fields");
  return t;
}

}  // namespace tpmrec
