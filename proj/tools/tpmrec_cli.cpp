// tpmrec: command-line front end for TPM-based key reconciliation experiments.
//
// Exit codes: 0 success, 2 non-convergence, 3 configuration error,
// 4 pipeline abort (estimated QBER above threshold), 1 anything else.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tpmrec/adversary.hpp"
#include "tpmrec/harness.hpp"
#include "tpmrec/pipeline.hpp"
#include "tpmrec/random.hpp"
#include "tpmrec/sync.hpp"

namespace {

using namespace tpmrec;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitConfig = 3;
constexpr int kExitAbort = 4;

struct ShapeOptions {
  int k = 6;
  int n = 8;
  int l = 2;
  TpmParams params() const { return {k, n, l}; }
};

void add_shape(CLI::App* cmd, ShapeOptions& shape) {
  cmd->add_option("-K,--hidden", shape.k, "hidden units")->capture_default_str();
  cmd->add_option("-N,--inputs", shape.n, "inputs per hidden unit")->capture_default_str();
  cmd->add_option("-L,--bound", shape.l, "weight bound")->capture_default_str();
}

// Output stream for --out, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// ---------------------------------------------------------------------------

struct SyncOptions {
  ShapeOptions shape;
  std::optional<double> overlap;
  std::optional<double> qber;
  std::uint64_t seed = 1;
  bool protocol_mode = false;
  std::int64_t digest_interval = 10;
  std::int64_t max_iterations = 0;
  std::int64_t trace_stride = 1;
  std::string out;
};

int run_sync(const SyncOptions& o) {
  const TpmParams p = o.shape.params();
  p.validate();
  SyncConfig cfg;
  cfg.params = p;
  cfg.seed = o.seed;
  cfg.termination = o.protocol_mode ? Termination::Digest : Termination::Oracle;
  cfg.digest_check_interval = o.digest_interval;
  cfg.max_iterations = o.max_iterations > 0 ? o.max_iterations : default_iteration_budget(p, o.seed);
  cfg.record_trace = true;
  cfg.trace_stride = o.trace_stride;

  Rng rng(derive_seed(o.seed, "alice-weights"));
  Tpm alice = Tpm::random(p, rng);
  Tpm bob = alice;
  std::string start = "random";
  if (o.qber) {
    const NoisyKeyPair raw = generate_key_pair(codec_bits(p), *o.qber, derive_seed(o.seed, "raw-key"));
    alice = bits_to_weights(raw.alice, p);
    bob = bits_to_weights(raw.bob, p);
    start = fmt::format("qber:{}", *o.qber);
  } else if (o.overlap) {
    bob = seed_initial_overlap(alice, *o.overlap, derive_seed(o.seed, "bob-overlap"));
    start = fmt::format("overlap:{}", *o.overlap);
  } else {
    Rng bob_rng(derive_seed(o.seed, "bob-weights"));
    bob = Tpm::random(p, bob_rng);
  }

  const double initial = weight_overlap(alice, bob);
  const SyncTranscript t = run_mutual_learning(alice, bob, cfg);

  Output out(o.out);
  if (!o.out.empty()) {
    out.stream() << "iteration,overlap\n";
    for (const auto& [it, ov] : t.overlap_trace) fmt::print(out.stream(), "{},{}\n", it, ov);
  }
  fmt::print("K={} N={} L={} start={} initial_overlap={:.4f}\n", p.hidden_units,
             p.inputs_per_unit, p.weight_bound, start, initial);
  fmt::print("iterations={} learning_steps={} digest_exchanges={} converged={}\n", t.iterations,
             t.learning_steps, t.digest_exchanges, t.converged ? "yes" : "no");
  if (t.converged) {
    fmt::print("key_digest={:016x} leakage_Z={:.3f} weights\n", weights_to_bits(alice).digest(),
               leakage_after(t.iterations, p).z_reduction);
  }
  return t.converged ? kExitOk : kExitNonConvergence;
}

// ---------------------------------------------------------------------------

struct ScenarioOptions {
  std::string file;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 1;
  bool protocol_mode = false;
  bool timing = false;
};

int run_scenario_cmd(const ScenarioOptions& o) {
  Scenario s = load_scenario(o.file);
  if (o.trials) s.trials = *o.trials;
  if (o.seed) s.base_seed = *o.seed;
  if (o.protocol_mode) s.termination = Termination::Digest;
  s.validate();

  Output out(o.out);
  bool all_converged = true;
  write_csv_header(out.stream());
  run_scenario(s, RunOptions{o.workers, o.timing}, [&](const TrialRecord& r) {
    write_csv_row(out.stream(), r);
    if (r.algorithm == "tpm" && !r.converged) all_converged = false;
  });
  return all_converged ? kExitOk : kExitNonConvergence;
}

// ---------------------------------------------------------------------------

struct CompareOptions {
  std::vector<std::size_t> lengths;
  std::vector<double> qbers;
  int k = 10;
  std::optional<int> n;
  int l = 2;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  int passes = 4;
  int workers = 1;
  std::string out;
};

int run_compare(const CompareOptions& o) {
  std::vector<std::size_t> lengths = o.lengths;
  std::vector<double> qbers = o.qbers;
  if (lengths.empty() && qbers.empty()) {
    lengths = {500, 600};
    qbers = {0.05, 0.03};
  }
  if (lengths.size() != qbers.size()) {
    throw ConfigError("--length and --qber must be given the same number of times");
  }
  std::vector<ComparisonTable> tables;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    CompareSetting setting;
    setting.key_length = lengths[i];
    setting.qber = qbers[i];
    // One machine weight per two raw-key bits unless N is given explicitly.
    const int n = o.n ? *o.n : std::max<int>(1, static_cast<int>(lengths[i] / (2 * static_cast<std::size_t>(o.k))));
    setting.params = TpmParams{o.k, n, o.l};
    setting.params.validate();
    tables.push_back(compare_algorithms(setting, o.trials, o.seed, RunOptions{o.workers, false}, o.passes));
  }
  write_comparison_table(std::cout, tables);
  if (!o.out.empty()) {
    Output out(o.out);
    write_comparison_csv(out.stream(), tables);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PipelineCliOptions {
  std::size_t length = 2250;
  double qber = 0.03;
  ShapeOptions shape{10, 30, 2};
  int security = 30;
  std::uint64_t seed = 1;
  double sample_fraction = 0.1;
  double threshold = 0.11;
  bool protocol_mode = false;
  std::int64_t digest_interval = 10;
};

int run_pipeline_cmd(const PipelineCliOptions& o) {
  PipelineOptions opts;
  opts.sample_fraction = o.sample_fraction;
  opts.qber_threshold = o.threshold;
  opts.termination = o.protocol_mode ? Termination::Digest : Termination::Oracle;
  opts.digest_check_interval = o.digest_interval;
  const PipelineReport r = run_pipeline(o.length, o.qber, o.shape.params(), o.security, o.seed, opts);

  fmt::print("raw key: {} bits, {} channel errors\n", r.raw.alice.size(), r.raw.error_positions.size());
  fmt::print("qber estimate: {}/{} = {:.4f} (threshold {})\n", r.estimate.mismatches,
             r.estimate.sampled_count, r.estimate.estimate, o.threshold);
  fmt::print("reconciliation: {} weight mismatches, {} iterations, {} learning steps, {} digest exchanges\n",
             r.initial_weight_mismatches, r.alice.transcript.iterations,
             r.alice.transcript.learning_steps, r.alice.transcript.digest_exchanges);
  fmt::print("disclosed bits: estimation={} synchronization={} digests={} codec_redundancy={} total={}\n",
             r.disclosed.estimation_bits, r.disclosed.synchronization_bits, r.disclosed.digest_bits,
             r.disclosed.codec_redundancy_bits, r.disclosed.total());
  fmt::print("budget: M={} E={} S={} R={} bound={:.3e} bits\n", r.budget.reconciled_bits,
             r.budget.eve_bits, r.budget.security_bits, r.budget.final_bits,
             r.budget.information_bound);
  fmt::print("toeplitz: {}x{} {}\n", r.hash.rows, r.hash.cols, r.hash.to_hex());
  fmt::print("final key: {} bits, digest {:016x}, alice==bob: {}\n", r.final_alice.size(),
             r.final_alice.digest(), r.final_alice == r.final_bob ? "yes" : "no");
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AttackCliOptions {
  ShapeOptions shape;
  std::string strategy = "passive";
  int ensemble = 1;
  std::int64_t budget = 1000;
  std::optional<double> overlap;
  std::optional<double> eve_overlap;
  std::int64_t trials = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int run_attack_cmd(const AttackCliOptions& o) {
  const TpmParams p = o.shape.params();
  p.validate();
  AttackConfig attack;
  if (o.strategy == "passive") {
    attack.strategy = AttackStrategy::Passive;
  } else if (o.strategy == "geometric") {
    attack.strategy = AttackStrategy::Geometric;
  } else if (o.strategy == "ensemble") {
    attack.strategy = AttackStrategy::Ensemble;
  } else {
    throw ConfigError("--strategy must be passive, geometric or ensemble");
  }
  attack.ensemble_size = o.ensemble;
  attack.iteration_budget = o.budget;
  attack.eve_initial_overlap = o.eve_overlap;
  attack.validate();

  Output out(o.out);
  if (!o.out.empty()) {
    out.stream() << "trial,partner_iterations,partner_converged,eve_best_overlap,"
                    "eve_overlap_at_partner_sync,eve_first_sync_iteration\n";
  }
  std::int64_t eve_synced = 0;
  std::int64_t partners_failed = 0;
  double overlap_sum = 0.0;
  for (std::int64_t trial = 0; trial < o.trials; ++trial) {
    const std::uint64_t seed = trial_seed(o.seed, trial, p);
    SyncConfig cfg;
    cfg.params = p;
    cfg.seed = seed;
    cfg.max_iterations = 1'000'000;
    Rng rng(derive_seed(seed, "alice-weights"));
    const Tpm alice = Tpm::random(p, rng);
    Tpm bob = alice;
    if (o.overlap) {
      bob = seed_initial_overlap(alice, *o.overlap, derive_seed(seed, "bob-overlap"));
    } else {
      Rng bob_rng(derive_seed(seed, "bob-weights"));
      bob = Tpm::random(p, bob_rng);
    }
    const auto [t, r] = run_attack(alice, bob, cfg, attack);
    eve_synced += r.first_sync_iteration >= 0;
    partners_failed += !t.converged;
    overlap_sum += r.best_overlap;
    if (!o.out.empty()) {
      fmt::print(out.stream(), "{},{},{},{},{},{}\n", trial, t.iterations, t.converged ? 1 : 0,
                 r.best_overlap, r.overlap_at_partner_sync, r.first_sync_iteration);
    }
    if (o.trials == 1) {
      fmt::print("alice/bob: {} iterations, converged={}\n", t.iterations, t.converged ? "yes" : "no");
      fmt::print("eve: observed {} iterations, best overlap {:.4f}, overlap at partner sync {:.4f}, "
                 "first exact match {}\n",
                 r.iterations_observed, r.best_overlap, r.overlap_at_partner_sync,
                 r.first_sync_iteration);
    }
  }
  if (o.trials > 1) {
    fmt::print("trials={} eve_reached_full_overlap={:.4f} mean_eve_final_overlap={:.4f}\n", o.trials,
               static_cast<double>(eve_synced) / static_cast<double>(o.trials),
               overlap_sum / static_cast<double>(o.trials));
  }
  return partners_failed == 0 ? kExitOk : kExitNonConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TPM-based key reconciliation: synchronization, baselines, attacks, pipeline"};
  app.require_subcommand(1);

  SyncOptions sync;
  auto* sync_cmd = app.add_subcommand("sync", "single mutual-learning run with overlap trace");
  add_shape(sync_cmd, sync.shape);
  auto* overlap_opt = sync_cmd->add_option("--overlap", sync.overlap, "initial weight agreement");
  sync_cmd->add_option("--qber", sync.qber, "load machines from a noisy raw key pair")
      ->excludes(overlap_opt);
  sync_cmd->add_option("--seed", sync.seed)->capture_default_str();
  sync_cmd->add_flag("--protocol-mode", sync.protocol_mode, "detect convergence by digest exchange");
  sync_cmd->add_option("--digest-interval", sync.digest_interval)->capture_default_str();
  sync_cmd->add_option("--max-iterations", sync.max_iterations, "0 = automatic");
  sync_cmd->add_option("--trace-stride", sync.trace_stride)->capture_default_str();
  sync_cmd->add_option("--out", sync.out, "CSV file for the overlap trace");

  ScenarioOptions scen;
  auto* scen_cmd = app.add_subcommand("scenario", "run a scenario file and emit trial CSV");
  scen_cmd->add_option("file", scen.file)->required();
  scen_cmd->add_option("--trials", scen.trials, "override trials per point");
  scen_cmd->add_option("--seed", scen.seed, "override base seed");
  scen_cmd->add_option("--out", scen.out, "CSV output (default stdout)");
  scen_cmd->add_option("--workers", scen.workers)->capture_default_str();
  scen_cmd->add_flag("--protocol-mode", scen.protocol_mode, "digest-based termination");
  scen_cmd->add_flag("--timing", scen.timing, "record per-trial wall time (breaks byte-identical reruns)");

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "BBBSS vs Cascade vs TPM-based iteration counts");
  cmp_cmd->add_option("--length", cmp.lengths, "key length in bits (repeatable)");
  cmp_cmd->add_option("--qber", cmp.qbers, "error rate (repeatable, paired with --length)");
  cmp_cmd->add_option("-K,--hidden", cmp.k)->capture_default_str();
  cmp_cmd->add_option("-N,--inputs", cmp.n, "default: length / (2K)");
  cmp_cmd->add_option("-L,--bound", cmp.l)->capture_default_str();
  cmp_cmd->add_option("--trials", cmp.trials)->capture_default_str();
  cmp_cmd->add_option("--seed", cmp.seed)->capture_default_str();
  cmp_cmd->add_option("--passes", cmp.passes)->capture_default_str();
  cmp_cmd->add_option("--workers", cmp.workers)->capture_default_str();
  cmp_cmd->add_option("--out", cmp.out, "CSV summary file");

  PipelineCliOptions pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "estimation, TPM reconciliation, privacy amplification");
  pipe_cmd->add_option("--length", pipe.length)->capture_default_str();
  pipe_cmd->add_option("--qber", pipe.qber)->capture_default_str();
  add_shape(pipe_cmd, pipe.shape);
  pipe_cmd->add_option("-S,--security", pipe.security)->capture_default_str();
  pipe_cmd->add_option("--seed", pipe.seed)->capture_default_str();
  pipe_cmd->add_option("--sample-fraction", pipe.sample_fraction)->capture_default_str();
  pipe_cmd->add_option("--threshold", pipe.threshold)->capture_default_str();
  pipe_cmd->add_flag("--protocol-mode", pipe.protocol_mode,
                     "detect convergence by digest exchange (digest bits are charged to Eve)");
  pipe_cmd->add_option("--digest-interval", pipe.digest_interval)->capture_default_str();

  AttackCliOptions atk;
  auto* atk_cmd = app.add_subcommand("attack", "eavesdropper simulation");
  add_shape(atk_cmd, atk.shape);
  atk_cmd->add_option("--strategy", atk.strategy, "passive, geometric or ensemble")->capture_default_str();
  atk_cmd->add_option("--ensemble", atk.ensemble)->capture_default_str();
  atk_cmd->add_option("--budget", atk.budget, "iterations Eve observes")->capture_default_str();
  atk_cmd->add_option("--overlap", atk.overlap, "Alice/Bob initial agreement");
  atk_cmd->add_option("--eve-overlap", atk.eve_overlap, "partially informed Eve");
  atk_cmd->add_option("--trials", atk.trials)->capture_default_str();
  atk_cmd->add_option("--seed", atk.seed)->capture_default_str();
  atk_cmd->add_option("--out", atk.out, "per-trial CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sync_cmd) return run_sync(sync);
    if (*scen_cmd) return run_scenario_cmd(scen);
    if (*cmp_cmd) return run_compare(cmp);
    if (*pipe_cmd) return run_pipeline_cmd(pipe);
    if (*atk_cmd) return run_attack_cmd(atk);
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const QberAbort& e) {
    std::cerr << "abort: " << e.what() << '\n';
    return kExitAbort;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RangeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleBudget& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
