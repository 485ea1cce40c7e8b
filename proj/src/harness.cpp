#include "tpmrec/harness.hpp"

#include <cctype>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tpmrec/errors.hpp"
#include "tpmrec/parity.hpp"
#include "tpmrec/random.hpp"

namespace tpmrec {

namespace pt = boost::property_tree;

// ---------------------------------------------------------------------------
// Start modes and scenario files

std::string StartMode::label() const {
  switch (kind) {
    case StartKind::Random: return "random";
    case StartKind::Overlap: return fmt::format("overlap:{}", value);
    case StartKind::FromQber: return fmt::format("qber:{}", value);
  }
  return "random";
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Trims and drops a trailing "; comment".
std::string value_text(const std::string& raw) {
  for (std::size_t pos = raw.find(';'); pos != std::string::npos; pos = raw.find(';', pos + 1)) {
    if (pos > 0 && std::isspace(static_cast<unsigned char>(raw[pos - 1]))) return trim(raw.substr(0, pos));
  }
  return trim(raw);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(what + ": expected a number, got '" + text + "'");
  }
}

long long parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(what + ": expected an integer, got '" + text + "'");
  }
}

// "6, 8, 10", "20-25" or a mix of both.
std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(static_cast<int>(parse_int(item, what)));
      continue;
    }
    const auto lo = parse_int(trim(item.substr(0, dash)), what);
    const auto hi = parse_int(trim(item.substr(dash + 1)), what);
    if (hi < lo) throw ConfigError(what + ": empty range '" + item + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

Termination parse_termination(const std::string& text) {
  if (text == "oracle") return Termination::Oracle;
  if (text == "digest" || text == "protocol") return Termination::Digest;
  throw ConfigError("sync.termination: expected 'oracle' or 'digest', got '" + text + "'");
}

AttackStrategy parse_strategy(const std::string& text) {
  if (text == "passive") return AttackStrategy::Passive;
  if (text == "geometric") return AttackStrategy::Geometric;
  if (text == "ensemble") return AttackStrategy::Ensemble;
  throw ConfigError("attack.strategy: expected passive, geometric or ensemble, got '" + text + "'");
}

}  // namespace

StartMode StartMode::parse(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "random") return {StartKind::Random, 0.0};
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("start mode: expected random, overlap:<f> or qber:<f>, got '" + text + "'");
  }
  const std::string kind = trim(text.substr(0, colon));
  const double value = parse_double(trim(text.substr(colon + 1)), "start mode");
  if (kind == "overlap") {
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError("start mode: overlap must lie in [0, 1]");
    return {StartKind::Overlap, value};
  }
  if (kind == "qber") {
    if (!(value >= 0.0 && value <= 0.5)) throw ConfigError("start mode: qber must lie in [0, 0.5]");
    return {StartKind::FromQber, value};
  }
  throw ConfigError("start mode: unknown kind '" + kind + "'");
}

void Scenario::validate() const {
  if (trials < 1) throw ConfigError("scenario.trials must be >= 1");
  if (kind == ScenarioKind::Compare) {
    if (settings.empty()) throw ConfigError("compare scenario needs at least one [setting.*]");
    if (parity_passes < 1) throw ConfigError("compare.passes must be >= 1");
    for (const auto& s : settings) {
      if (s.key_length < 1) throw ConfigError("setting.length must be >= 1");
      if (!(s.qber > 0.0 && s.qber <= 0.5)) throw ConfigError("setting.qber must lie in (0, 0.5]");
      try {
        s.params.validate();
      } catch (const RangeError& e) {
        throw ConfigError(e.what());
      }
    }
    return;
  }
  if (hidden_units.empty() || inputs_per_unit.empty()) throw ConfigError("tpm.K and tpm.N must be non-empty");
  for (int k : hidden_units) {
    if (k < 1) throw ConfigError("tpm.K entries must be >= 1");
  }
  for (int n : inputs_per_unit) {
    if (n < 1) throw ConfigError("tpm.N entries must be >= 1");
  }
  if (weight_bound < 1) throw ConfigError("tpm.L must be >= 1");
  if (start_modes.empty()) throw ConfigError("start.modes must be non-empty");
  for (const auto& m : start_modes) {
    if (m.kind == StartKind::Overlap && !(m.value >= 0.0 && m.value <= 1.0)) {
      throw ConfigError("overlap start mode must lie in [0, 1]");
    }
    if (m.kind == StartKind::FromQber && !(m.value >= 0.0 && m.value <= 0.5)) {
      throw ConfigError("qber start mode must lie in [0, 0.5]");
    }
  }
  if (digest_check_interval < 1) throw ConfigError("sync.digest_interval must be >= 1");
  if (max_iterations < 0) throw ConfigError("sync.max_iterations must be >= 0");
  if (attack) {
    try {
      attack->validate();
    } catch (const RangeError& e) {
      throw ConfigError(e.what());
    }
  }
}

Scenario parse_scenario(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("scenario file: ") + e.what());
  }

  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(path)) return value_text(*v);
    return std::nullopt;
  };

  Scenario s;
  if (auto v = get("scenario.name")) s.name = *v;
  if (auto v = get("scenario.kind")) {
    if (*v == "sync") {
      s.kind = ScenarioKind::Sync;
    } else if (*v == "compare") {
      s.kind = ScenarioKind::Compare;
    } else {
      throw ConfigError("scenario.kind: expected sync or compare, got '" + *v + "'");
    }
  }
  if (auto v = get("scenario.trials")) s.trials = parse_int(*v, "scenario.trials");
  if (auto v = get("scenario.seed")) {
    s.base_seed = static_cast<std::uint64_t>(parse_int(*v, "scenario.seed"));
  }

  if (auto v = get("tpm.K")) s.hidden_units = parse_int_list(*v, "tpm.K");
  if (auto v = get("tpm.N")) s.inputs_per_unit = parse_int_list(*v, "tpm.N");
  if (auto v = get("tpm.L")) s.weight_bound = static_cast<int>(parse_int(*v, "tpm.L"));

  if (auto v = get("start.modes")) {
    s.start_modes.clear();
    for (const auto& item : split(*v, ',')) s.start_modes.push_back(StartMode::parse(item));
  }

  if (auto v = get("sync.termination")) s.termination = parse_termination(*v);
  if (auto v = get("sync.digest_interval")) {
    s.digest_check_interval = parse_int(*v, "sync.digest_interval");
  }
  if (auto v = get("sync.max_iterations")) {
    s.max_iterations = *v == "auto" ? 0 : parse_int(*v, "sync.max_iterations");
  }

  if (tree.get_child_optional("attack")) {
    AttackConfig a;
    if (auto v = get("attack.strategy")) a.strategy = parse_strategy(*v);
    if (auto v = get("attack.ensemble")) a.ensemble_size = static_cast<int>(parse_int(*v, "attack.ensemble"));
    if (auto v = get("attack.budget")) a.iteration_budget = parse_int(*v, "attack.budget");
    if (auto v = get("attack.eve_overlap")) a.eve_initial_overlap = parse_double(*v, "attack.eve_overlap");
    s.attack = a;
  }

  if (auto v = get("compare.passes")) s.parity_passes = static_cast<int>(parse_int(*v, "compare.passes"));
  for (const auto& [section, body] : tree) {
    if (section.rfind("setting", 0) != 0) continue;
    CompareSetting c;
    const std::string where = section + ".";
    if (auto v = body.get_optional<std::string>("length")) {
      c.key_length = static_cast<std::size_t>(parse_int(value_text(*v), where + "length"));
    }
    if (auto v = body.get_optional<std::string>("qber")) c.qber = parse_double(value_text(*v), where + "qber");
    if (auto v = body.get_optional<std::string>("K")) c.params.hidden_units = static_cast<int>(parse_int(value_text(*v), where + "K"));
    if (auto v = body.get_optional<std::string>("N")) c.params.inputs_per_unit = static_cast<int>(parse_int(value_text(*v), where + "N"));
    if (auto v = body.get_optional<std::string>("L")) c.params.weight_bound = static_cast<int>(parse_int(value_text(*v), where + "L"));
    s.settings.push_back(c);
  }

  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

// ---------------------------------------------------------------------------
// CSV

void write_csv_header(std::ostream& out) {
  fmt::print(out, "# tpmrec trial records, schema v{}\n", kCsvSchemaVersion);
  out << "scenario,trial,algorithm,K,N,L,start_mode,key_length,qber,iterations,learning_steps,"
         "parity_checks,disclosed_bits,attacker_best_overlap,converged,alice_key_digest,"
         "bob_key_digest,wall_time_us\n";
}

void write_csv_row(std::ostream& out, const TrialRecord& r) {
  fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:016x},{:016x},{}\n", r.scenario,
             r.trial, r.algorithm, r.hidden_units, r.inputs_per_unit, r.weight_bound, r.start_mode,
             r.key_length, r.qber, r.iterations, r.learning_steps, r.parity_checks,
             r.disclosed_bits, r.attacker_best_overlap, r.converged ? 1 : 0, r.alice_key_digest,
             r.bob_key_digest, r.wall_time_us);
}

// ---------------------------------------------------------------------------
// Execution

std::uint64_t trial_seed(std::uint64_t base_seed, std::int64_t trial, const TpmParams& params) {
  const std::uint64_t shape = (static_cast<std::uint64_t>(params.hidden_units) << 40) ^
                              (static_cast<std::uint64_t>(params.inputs_per_unit) << 20) ^
                              static_cast<std::uint64_t>(params.weight_bound);
  return derive_seed(derive_seed(base_seed, static_cast<std::uint64_t>(trial)), shape);
}

namespace {

// Runs task(i) for i in [0, count) on `workers` threads; results land at index i.
template <typename Result, typename Task>
std::vector<Result> parallel_map(std::size_t count, int workers, const Task& task) {
  std::vector<Result> results(count);
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) results[i] = task(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

struct SyncPoint {
  TpmParams params;
  StartMode mode;
  std::int64_t max_iterations;
};

TrialRecord run_sync_trial(const Scenario& s, const SyncPoint& point, std::int64_t trial,
                           bool timing) {
  const auto started = std::chrono::steady_clock::now();
  const TpmParams& p = point.params;
  const std::uint64_t seed = trial_seed(s.base_seed, trial, p);

  SyncConfig cfg;
  cfg.params = p;
  cfg.max_iterations = point.max_iterations;
  cfg.digest_check_interval = s.digest_check_interval;
  cfg.seed = seed;
  cfg.termination = s.termination;

  Rng alice_rng(derive_seed(seed, "alice-weights"));
  std::optional<Tpm> alice;
  std::optional<Tpm> bob;
  switch (point.mode.kind) {
    case StartKind::Random: {
      alice = Tpm::random(p, alice_rng);
      Rng bob_rng(derive_seed(seed, "bob-weights"));
      bob = Tpm::random(p, bob_rng);
      break;
    }
    case StartKind::Overlap:
      alice = Tpm::random(p, alice_rng);
      bob = seed_initial_overlap(*alice, point.mode.value, derive_seed(seed, "bob-overlap"));
      break;
    case StartKind::FromQber: {
      const NoisyKeyPair raw = generate_key_pair(codec_bits(p), point.mode.value,
                                                 derive_seed(seed, "raw-key"));
      alice = bits_to_weights(raw.alice, p);
      bob = bits_to_weights(raw.bob, p);
      break;
    }
  }

  TrialRecord r;
  r.scenario = s.name;
  r.trial = trial;
  r.algorithm = "tpm";
  r.hidden_units = p.hidden_units;
  r.inputs_per_unit = p.inputs_per_unit;
  r.weight_bound = p.weight_bound;
  r.start_mode = point.mode.label();
  r.key_length = static_cast<std::int64_t>(codec_bits(p));
  if (point.mode.kind == StartKind::FromQber) r.qber = point.mode.value;

  SyncTranscript t;
  if (s.attack) {
    auto [transcript, attack] = run_attack_in_place(*alice, *bob, cfg, *s.attack);
    t = std::move(transcript);
    r.attacker_best_overlap = attack.best_overlap;
  } else {
    t = run_mutual_learning(*alice, *bob, cfg);
  }
  r.iterations = t.iterations;
  r.learning_steps = t.learning_steps;
  r.disclosed_bits = t.iterations + t.digest_bits();
  r.converged = t.converged;
  r.alice_key_digest = weights_to_bits(*alice).digest();
  r.bob_key_digest = weights_to_bits(*bob).digest();
  if (timing) {
    r.wall_time_us = std::chrono::duration_cast<std::chrono::microseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
  }
  return r;
}

std::vector<TrialRecord> run_compare_trial(const CompareSetting& setting, const std::string& name,
                                           std::int64_t trial, std::uint64_t base_seed,
                                           int passes, bool timing) {
  const std::uint64_t seed = trial_seed(base_seed, trial, setting.params);
  const NoisyKeyPair pair =
      generate_key_pair(setting.key_length, setting.qber, derive_seed(seed, "raw-key"));

  std::vector<TrialRecord> out;
  auto base_record = [&](const char* algorithm) {
    TrialRecord r;
    r.scenario = name;
    r.trial = trial;
    r.algorithm = algorithm;
    r.key_length = static_cast<std::int64_t>(setting.key_length);
    r.qber = setting.qber;
    return r;
  };

  for (auto algorithm : {ParityAlgorithm::Bbbss, ParityAlgorithm::Cascade}) {
    const auto started = std::chrono::steady_clock::now();
    ParityConfig cfg;
    cfg.qber_hint = setting.qber;
    cfg.passes = passes;
    cfg.seed = derive_seed(seed, "parity");
    cfg.algorithm = algorithm;
    const ParityOutcome o = run_parity_reconciliation(pair, cfg);
    TrialRecord r = base_record(algorithm == ParityAlgorithm::Bbbss ? "bbbss" : "cascade");
    r.start_mode = fmt::format("qber:{}", setting.qber);
    r.iterations = o.parity_checks;
    r.parity_checks = o.parity_checks;
    r.disclosed_bits = o.disclosed_bits;
    r.converged = o.residual_errors == 0;
    r.alice_key_digest = o.corrected_alice.digest();
    r.bob_key_digest = o.corrected_bob.digest();
    if (timing) {
      r.wall_time_us = std::chrono::duration_cast<std::chrono::microseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    }
    out.push_back(std::move(r));
  }

  Scenario tpm;
  tpm.name = name;
  tpm.base_seed = base_seed;
  const SyncPoint point{setting.params, StartMode{StartKind::Overlap, 1.0 - setting.qber},
                        100000};
  TrialRecord r = run_sync_trial(tpm, point, trial, timing);
  r.qber = setting.qber;
  out.push_back(std::move(r));
  return out;
}

}  // namespace

void run_scenario(const Scenario& scenario, const RunOptions& options,
                  const std::function<void(const TrialRecord&)>& sink) {
  scenario.validate();
  const auto trials = static_cast<std::size_t>(scenario.trials);

  if (scenario.kind == ScenarioKind::Compare) {
    for (const auto& setting : scenario.settings) {
      auto rows = parallel_map<std::vector<TrialRecord>>(trials, options.workers, [&](std::size_t i) {
        return run_compare_trial(setting, scenario.name, static_cast<std::int64_t>(i),
                                 scenario.base_seed, scenario.parity_passes, options.timing);
      });
      for (const auto& trial_rows : rows) {
        for (const auto& r : trial_rows) sink(r);
      }
    }
    return;
  }

  for (int k : scenario.hidden_units) {
    for (int n : scenario.inputs_per_unit) {
      const TpmParams params{k, n, scenario.weight_bound};
      const std::int64_t budget = scenario.max_iterations > 0
                                      ? scenario.max_iterations
                                      : default_iteration_budget(params, scenario.base_seed);
      for (const auto& mode : scenario.start_modes) {
        const SyncPoint point{params, mode, budget};
        auto rows = parallel_map<TrialRecord>(trials, options.workers, [&](std::size_t i) {
          return run_sync_trial(scenario, point, static_cast<std::int64_t>(i), options.timing);
        });
        for (const auto& r : rows) sink(r);
      }
    }
  }
}

std::vector<TrialRecord> run_scenario(const Scenario& scenario, const RunOptions& options) {
  std::vector<TrialRecord> out;
  run_scenario(scenario, options, [&](const TrialRecord& r) { out.push_back(r); });
  return out;
}

void write_scenario_csv(const Scenario& scenario, const RunOptions& options, std::ostream& out) {
  write_csv_header(out);
  run_scenario(scenario, options, [&](const TrialRecord& r) { write_csv_row(out, r); });
}

// ---------------------------------------------------------------------------
// Algorithm comparison

namespace {

AlgorithmSummary summarize(const std::string& algorithm, const std::vector<TrialRecord>& records) {
  AlgorithmSummary s;
  s.algorithm = algorithm;
  double sum = 0.0;
  double sum_sq = 0.0;
  double disclosed = 0.0;
  std::int64_t failures = 0;
  for (const auto& r : records) {
    if (r.algorithm != algorithm) continue;
    ++s.trials;
    const auto x = static_cast<double>(r.iterations);
    sum += x;
    sum_sq += x * x;
    disclosed += static_cast<double>(r.disclosed_bits);
    failures += r.converged ? 0 : 1;
  }
  if (s.trials == 0) return s;
  const auto n = static_cast<double>(s.trials);
  s.mean_iterations = sum / n;
  s.stddev_iterations = s.trials > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1))) : 0.0;
  s.mean_disclosed_bits = disclosed / n;
  s.failure_rate = static_cast<double>(failures) / n;
  return s;
}

}  // namespace

ComparisonTable compare_algorithms(const CompareSetting& setting, std::int64_t trials,
                                   std::uint64_t seed, const RunOptions& options,
                                   int parity_passes) {
  if (trials < 100) throw RangeError("compare_algorithms: trials must be >= 100");
  Scenario s;
  s.name = fmt::format("compare-{}-{}", setting.key_length, setting.qber);
  s.kind = ScenarioKind::Compare;
  s.trials = trials;
  s.base_seed = seed;
  s.settings = {setting};
  s.parity_passes = parity_passes;

  ComparisonTable table;
  table.setting = setting;
  table.records = run_scenario(s, options);
  for (const char* algorithm : {"bbbss", "cascade", "tpm"}) {
    table.rows.push_back(summarize(algorithm, table.records));
  }
  return table;
}

void write_comparison_table(std::ostream& out, const std::vector<ComparisonTable>& tables) {
  fmt::print(out, "{:<24} {:>12} {:>12} {:>12}\n", "mean iterations", "BBBSS", "Cascade",
             "TPM-based");
  for (const auto& t : tables) {
    const std::string label =
        fmt::format("{} bits, QBER {:.0f}%", t.setting.key_length, 100.0 * t.setting.qber);
    fmt::print(out, "{:<24} {:>12.1f} {:>12.1f} {:>12.1f}\n", label, t.rows[0].mean_iterations,
               t.rows[1].mean_iterations, t.rows[2].mean_iterations);
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonTable>& tables) {
  fmt::print(out, "# tpmrec algorithm comparison, schema v{}\n", kCsvSchemaVersion);
  out << "key_length,qber,K,N,L,algorithm,trials,mean_iterations,stddev_iterations,"
         "mean_disclosed_bits,failure_rate\n";
  for (const auto& t : tables) {
    for (const auto& row : t.rows) {
      fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", t.setting.key_length, t.setting.qber,
                 t.setting.params.hidden_units, t.setting.params.inputs_per_unit,
                 t.setting.params.weight_bound, row.algorithm, row.trials, row.mean_iterations,
                 row.stddev_iterations, row.mean_disclosed_bits, row.failure_rate);
    }
  }
}

}  // namespace tpmrec
