#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "tpmrec/errors.hpp"
#include "tpmrec/harness.hpp"
#include "tpmrec/pipeline.hpp"

using namespace tpmrec;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

const char* kSmall = R"(
[scenario]
name = small
kind = sync
trials = 40
seed = 5

[tpm]
K = 3, 4
N = 5-6
L = 2

[start]
modes = random, overlap:0.9, qber:0.05

[attack]
strategy = geometric
budget = 200
)";

}  // namespace

TEST_CASE("StartMode parse and label") {
  CHECK(StartMode::parse("random").kind == StartKind::Random);
  const auto o = StartMode::parse("overlap:0.95");
  CHECK(o.kind == StartKind::Overlap);
  CHECK(o.value == 0.95);
  CHECK(o.label() == "overlap:0.95");
  CHECK(StartMode::parse("qber:0.05").label() == "qber:0.05");
  CHECK_THROWS_AS(StartMode::parse("overlap:1.5"), ConfigError);
  CHECK_THROWS_AS(StartMode::parse("overlap:"), ConfigError);
  CHECK_THROWS_AS(StartMode::parse("sideways"), ConfigError);
}

TEST_CASE("parse_scenario") {
  const auto s = parse(kSmall);
  CHECK(s.name == "small");
  CHECK(s.trials == 40);
  CHECK(s.base_seed == 5);
  CHECK(s.hidden_units == std::vector<int>{3, 4});
  CHECK(s.inputs_per_unit == std::vector<int>{5, 6});
  CHECK(s.start_modes.size() == 3);
  REQUIRE(s.attack.has_value());
  CHECK(s.attack->strategy == AttackStrategy::Geometric);
  CHECK(s.attack->iteration_budget == 200);

  CHECK(parse("[scenario]\nkind = compare ; parity baselines\n[setting.a]\nlength = 100 ; bits\n")
            .settings.front().key_length == 100);
  CHECK_THROWS_AS(parse("[scenario]\nkind = dance\n"), ConfigError);
  CHECK_THROWS_AS(parse("[scenario]\ntrials = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[scenario]\ntrials = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("[tpm]\nK = \n"), ConfigError);
  CHECK_THROWS_AS(parse("[tpm]\nN = 9-3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[start]\nmodes = overlap:2\n"), ConfigError);
  CHECK_THROWS_AS(parse("not an ini [[["), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.ini"), ConfigError);
}

TEST_CASE("bundled scenarios load") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(TPMREC_SCENARIO_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CHECK_NOTHROW(load_scenario(entry.path().string()));
    ++count;
  }
  CHECK(count >= 6);
}

TEST_CASE("scenario records") {
  const auto s = parse(kSmall);
  const auto records = run_scenario(s);
  REQUIRE(records.size() == 2 * 2 * 3 * 40);
  for (const auto& r : records) {
    CHECK(r.algorithm == "tpm");
    CHECK(r.wall_time_us == -1);
    CHECK(r.attacker_best_overlap >= 0.0);
    if (r.converged) CHECK(r.alice_key_digest == r.bob_key_digest);
  }
  CHECK(records.front().trial == 0);
  CHECK(records.front().start_mode == "random");
}

TEST_CASE("scenario CSV is byte-identical across reruns and worker counts") {
  const auto s = parse(kSmall);
  std::ostringstream a;
  std::ostringstream b;
  std::ostringstream c;
  write_scenario_csv(s, RunOptions{1, false}, a);
  write_scenario_csv(s, RunOptions{1, false}, b);
  write_scenario_csv(s, RunOptions{3, false}, c);
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
  CHECK(a.str().rfind("# tpmrec trial records, schema v1\n", 0) == 0);
}

TEST_CASE("trial seeds do not depend on the start mode") {
  const TpmParams p{3, 5, 2};
  CHECK(trial_seed(1, 0, p) == trial_seed(1, 0, p));
  CHECK(trial_seed(1, 0, p) != trial_seed(1, 1, p));
  CHECK(trial_seed(1, 0, p) != trial_seed(1, 0, TpmParams{3, 6, 2}));
}

TEST_CASE("compare_algorithms") {
  CompareSetting setting;
  setting.key_length = 200;
  setting.qber = 0.05;
  setting.params = TpmParams{4, 25, 2};
  CHECK_THROWS_AS(compare_algorithms(setting, 99, 1), RangeError);
  const auto table = compare_algorithms(setting, 100, 1);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].algorithm == "bbbss");
  CHECK(table.rows[1].algorithm == "cascade");
  CHECK(table.rows[2].algorithm == "tpm");
  CHECK(table.records.size() == 300);
  CHECK(table.rows[1].mean_iterations < table.rows[0].mean_iterations);
}

TEST_CASE("pipeline with a noiseless channel") {
  const auto report = run_pipeline(2250, 0.0, TpmParams{10, 30, 2}, 30, 1);
  CHECK(report.initial_weight_mismatches == 0);
  CHECK(report.alice.transcript.iterations == 0);
  CHECK(report.final_alice == report.final_bob);
}

TEST_CASE("pipeline at 3% QBER") {
  const auto report = run_pipeline(2250, 0.03, TpmParams{10, 30, 2}, 30, 7);
  CHECK(report.alice.final_key.size() == 900);
  CHECK(report.alice.final_key == report.bob.final_key);
  CHECK(report.budget.eve_bits == report.disclosed.total());
  CHECK(report.budget.final_bits == 900 - report.budget.eve_bits - 30);
  CHECK(static_cast<std::int64_t>(report.final_alice.size()) == report.budget.final_bits);
  CHECK(report.final_alice == report.final_bob);
}

TEST_CASE("pipeline aborts and rejects infeasible budgets") {
  CHECK_THROWS_AS(run_pipeline(2250, 0.2, TpmParams{10, 30, 2}, 30, 1), QberAbort);
  CHECK_THROWS_AS(run_pipeline(2250, 0.03, TpmParams{10, 30, 2}, 900, 1), InfeasibleBudget);
}
