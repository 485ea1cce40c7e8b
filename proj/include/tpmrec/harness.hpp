/**
 * @file harness.hpp
 * @brief Seeded Monte-Carlo experiment runner: scenario files, trial records and CSV output.
 *
 * Scenario files are INI-style (key = value under [section] headers). A scenario either
 * sweeps mutual-learning sessions over machine shapes and start modes (kind = sync) or
 * compares BBBSS, Cascade and TPM reconciliation on shared noisy key pairs
 * (kind = compare). See scenarios/ for the bundled files.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tpmrec/adversary.hpp"
#include "tpmrec/channel.hpp"
#include "tpmrec/sync.hpp"

namespace tpmrec {

enum class StartKind {
  Random,    ///< independent uniformly random weights
  Overlap,   ///< Bob = Alice with a fixed fraction of weights perturbed
  FromQber,  ///< both machines loaded from a noisy raw key pair through the bit codec
};

struct StartMode {
  StartKind kind = StartKind::Random;
  double value = 0.0;

  /// "random", "overlap:<f>" or "qber:<f>"
  std::string label() const;
  static StartMode parse(const std::string& text);
};

enum class ScenarioKind { Sync, Compare };

struct CompareSetting {
  std::size_t key_length = 500;
  double qber = 0.05;
  TpmParams params{10, 25, 2};
};

struct Scenario {
  std::string name = "scenario";
  ScenarioKind kind = ScenarioKind::Sync;
  std::int64_t trials = 1000;
  std::uint64_t base_seed = 1;

  // kind = sync
  std::vector<int> hidden_units{6};
  std::vector<int> inputs_per_unit{8};
  int weight_bound = 2;
  std::vector<StartMode> start_modes{StartMode{}};
  std::optional<AttackConfig> attack;
  Termination termination = Termination::Oracle;
  std::int64_t digest_check_interval = 10;
  std::int64_t max_iterations = 0;  ///< 0: ten times the pilot random-start mean per shape

  // kind = compare
  std::vector<CompareSetting> settings;
  int parity_passes = 4;

  /// Throws ConfigError on empty sweeps or out-of-range values.
  void validate() const;
};

/// Parses scenario text; throws ConfigError on malformed input.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

/// One Monte-Carlo outcome. Inapplicable numeric fields hold -1.
struct TrialRecord {
  std::string scenario;
  std::int64_t trial = 0;
  std::string algorithm;  ///< tpm, bbbss or cascade
  int hidden_units = -1;
  int inputs_per_unit = -1;
  int weight_bound = -1;
  std::string start_mode;
  std::int64_t key_length = -1;
  double qber = -1.0;
  std::int64_t iterations = -1;
  std::int64_t learning_steps = -1;
  std::int64_t parity_checks = -1;
  std::int64_t disclosed_bits = -1;
  double attacker_best_overlap = -1.0;
  bool converged = false;
  std::uint64_t alice_key_digest = 0;
  std::uint64_t bob_key_digest = 0;
  std::int64_t wall_time_us = -1;
};

inline constexpr int kCsvSchemaVersion = 1;

/// `# tpmrec trial records, schema v1` followed by the column header row.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const TrialRecord& record);

struct RunOptions {
  int workers = 1;
  /// Fill wall_time_us. Off by default so that reruns are byte-identical.
  bool timing = false;
};

/// Seed of trial `trial` for a given shape; independent of the start mode so that
/// modes at the same shape share Alice's machine and input stream.
std::uint64_t trial_seed(std::uint64_t base_seed, std::int64_t trial, const TpmParams& params);

/// Executes every trial and hands records to `sink` in deterministic order
/// (point by point, trial index ascending), regardless of worker scheduling.
void run_scenario(const Scenario& scenario, const RunOptions& options,
                  const std::function<void(const TrialRecord&)>& sink);

std::vector<TrialRecord> run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Runs the scenario and writes header plus rows.
void write_scenario_csv(const Scenario& scenario, const RunOptions& options, std::ostream& out);

struct AlgorithmSummary {
  std::string algorithm;
  std::int64_t trials = 0;
  double mean_iterations = 0.0;
  double stddev_iterations = 0.0;
  double mean_disclosed_bits = 0.0;
  double failure_rate = 0.0;  ///< residual errors (parity) or non-convergence (tpm)
};

struct ComparisonTable {
  CompareSetting setting;
  std::vector<AlgorithmSummary> rows;  ///< bbbss, cascade, tpm
  std::vector<TrialRecord> records;
};

/// BBBSS, Cascade and TPM reconciliation over the same stream of noisy key pairs.
/// The TPM column starts Bob's machine at weight agreement (1 - qber).
/// Throws RangeError when trials < 100.
ComparisonTable compare_algorithms(const CompareSetting& setting, std::int64_t trials,
                                   std::uint64_t seed, const RunOptions& options = {},
                                   int parity_passes = 4);

/// Aligned text table for a set of comparisons.
void write_comparison_table(std::ostream& out, const std::vector<ComparisonTable>& tables);
/// One CSV row per (setting, algorithm).
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonTable>& tables);

}  // namespace tpmrec
