#include "tpmrec/adversary.hpp"

#include <algorithm>
#include <cstdlib>

#include "tpmrec/random.hpp"

namespace tpmrec {

void AttackConfig::validate() const {
  if (ensemble_size < 1) throw RangeError("AttackConfig: ensemble_size must be >= 1");
  if (strategy != AttackStrategy::Ensemble && ensemble_size != 1) {
    throw RangeError("AttackConfig: ensemble_size must be 1 unless the strategy is Ensemble");
  }
  if (iteration_budget < 0) throw RangeError("AttackConfig: iteration_budget must be >= 0");
  if (eve_initial_overlap && !(*eve_initial_overlap >= 0.0 && *eve_initial_overlap <= 1.0)) {
    throw RangeError("AttackConfig: eve_initial_overlap must lie in [0, 1]");
  }
}

namespace {

std::size_t weakest_unit(const TpmEvaluation& e) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < e.local_field.size(); ++k) {
    if (std::abs(e.local_field[k]) < std::abs(e.local_field[best])) best = k;
  }
  return best;
}

}  // namespace

std::pair<SyncTranscript, AttackResult> run_attack(const Tpm& alice, const Tpm& bob,
                                                   const SyncConfig& config,
                                                   const AttackConfig& attack) {
  Tpm a = alice;
  Tpm b = bob;
  return run_attack_in_place(a, b, config, attack);
}

std::pair<SyncTranscript, AttackResult> run_attack_in_place(Tpm& alice, Tpm& bob,
                                                            const SyncConfig& config,
                                                            const AttackConfig& attack) {
  config.validate();
  attack.validate();
  if (alice.params() != config.params || bob.params() != config.params) {
    throw DimensionError("run_attack: machine shape differs from SyncConfig.params");
  }
  std::vector<Tpm> eves;
  for (int m = 0; m < attack.ensemble_size; ++m) {
    const std::uint64_t s = derive_seed(derive_seed(config.seed, "eve"), static_cast<std::uint64_t>(m));
    if (attack.eve_initial_overlap) {
      eves.push_back(seed_initial_overlap(alice, *attack.eve_initial_overlap, s));
    } else {
      Rng rng(s);
      eves.push_back(Tpm::random(config.params, rng));
    }
  }

  SyncTranscript t;
  AttackResult r;
  r.eve_learning_steps.assign(eves.size(), 0);
  Rng inputs(derive_seed(config.seed, "alice-inputs"));
  const bool geometric = attack.strategy == AttackStrategy::Geometric;

  auto best_overlap = [&] {
    double best = 0.0;
    for (const auto& e : eves) best = std::max(best, weight_overlap(e, alice));
    return best;
  };
  auto note_eve_sync = [&](std::int64_t it) {
    if (r.first_sync_iteration >= 0) return;
    for (const auto& e : eves) {
      if (e == alice) {
        r.first_sync_iteration = it;
        return;
      }
    }
  };

  note_eve_sync(0);
  std::int64_t it = 0;
  bool partners_synced = alice == bob;
  if (partners_synced) {
    t.converged = true;
    r.overlap_at_partner_sync = best_overlap();
  }
  while (it < config.max_iterations) {
    if (partners_synced && it >= attack.iteration_budget) break;

    ++it;
    const InputVector x = InputVector::random(config.params, inputs);
    const TpmEvaluation ea = evaluate(alice, x);
    const TpmEvaluation eb = evaluate(bob, x);
    if (ea.tau == eb.tau) {
      for (std::size_t m = 0; m < eves.size(); ++m) {
        TpmEvaluation ee = evaluate(eves[m], x);
        if (ee.tau != ea.tau) {
          if (!geometric) continue;
          const std::size_t k = weakest_unit(ee);
          ee.sigma[k] = -ee.sigma[k];
          ee.tau = -ee.tau;
        }
        apply_hebbian(eves[m], x, ee, ea.tau);
        ++r.eve_learning_steps[m];
      }
      apply_hebbian(alice, x, ea, eb.tau);
      apply_hebbian(bob, x, eb, ea.tau);
      ++r.partner_learning_steps;
      if (!partners_synced) ++t.learning_steps;
    }
    if (!partners_synced) ++t.iterations;
    note_eve_sync(it);

    if (!partners_synced && alice == bob) {
      partners_synced = true;
      t.converged = true;
      r.overlap_at_partner_sync = best_overlap();
    }
  }

  r.iterations_observed = it;
  for (const auto& e : eves) r.per_machine_overlap.push_back(weight_overlap(e, alice));
  r.best_overlap = *std::max_element(r.per_machine_overlap.begin(), r.per_machine_overlap.end());
  r.synced = r.best_overlap == 1.0;
  return {std::move(t), std::move(r)};
}

}  // namespace tpmrec
