#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ppmbench/driftgen.hpp"
#include "ppmbench/error.hpp"
#include "ppmbench/harness.hpp"

using namespace ppmbench;

namespace {

EventLog generated_log(std::size_t n_cases, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n_cases = n_cases;
  cfg.seed = seed;
  return generate(cfg);
}

}  // namespace

TEST_CASE("split A on 2000 traces gives 200/1400/400") {
  EventLog log = generated_log(2000, 1);
  Split parts = split(log, SplitSetting::A());
  CHECK(parts.tr0.size() == 200);
  CHECK(parts.tr1.size() == 1400);
  CHECK(parts.te.size() == 400);
}

TEST_CASE("split B on 2000 traces gives 800/800/400") {
  EventLog log = generated_log(2000, 1);
  Split parts = split(log, SplitSetting::B());
  CHECK(parts.tr0.size() == 800);
  CHECK(parts.tr1.size() == 800);
  CHECK(parts.te.size() == 400);
}

TEST_CASE("split respects temporal ordering") {
  EventLog log = generated_log(137, 2);
  Split parts = split(log, SplitSetting::A());
  CHECK(parts.tr0.size() + parts.tr1.size() + parts.te.size() == 137);
  auto max_start = [](const std::vector<Trace>& v) {
    Timestamp m{std::numeric_limits<std::int64_t>::min()};
    for (const auto& t : v) m = std::max(m, t.start_time());
    return m;
  };
  auto min_start = [](const std::vector<Trace>& v) {
    Timestamp m{std::numeric_limits<std::int64_t>::max()};
    for (const auto& t : v) m = std::min(m, t.start_time());
    return m;
  };
  CHECK(max_start(parts.tr0) <= min_start(parts.tr1));
  CHECK(max_start(parts.tr1) <= min_start(parts.te));
}

TEST_CASE("split rejects tiny logs and bad fractions") {
  EventLog log = generated_log(8, 3);
  CHECK_THROWS_AS(split(log, SplitSetting::A()), Error);
  CHECK_THROWS_AS(SplitSetting::custom(0.5, 0.5, 0.2), Error);
  CHECK_THROWS_AS(SplitSetting::custom(0.5, 0.5, 0.0), Error);
}

TEST_CASE("validation sampling sizes for the standard splits") {
  EventLog log = generated_log(2000, 4);
  Split a = split(log, SplitSetting::A());
  Rng rng(1);
  auto [fit0, val0] = sample_validation(a.tr0, 0.20, rng);
  CHECK(val0.size() == 40);  // 2% of the 2000-case dataset
  CHECK(fit0.size() == 160);

  std::vector<Trace> train80 = a.tr0;
  train80.insert(train80.end(), a.tr1.begin(), a.tr1.end());
  Rng rng2(1);
  auto [fit01, val01] = sample_validation(train80, 0.20, rng2);
  CHECK(val01.size() == 320);  // 16% of the dataset for the 80% train set
  CHECK(fit01.size() == 1280);
}

TEST_CASE("validation sampling is a disjoint union and seed-deterministic") {
  EventLog log = generated_log(100, 5);
  Rng rng1(9), rng2(9), rng3(10);
  auto [fit_a, val_a] = sample_validation(log.traces(), 0.2, rng1);
  auto [fit_b, val_b] = sample_validation(log.traces(), 0.2, rng2);
  auto [fit_c, val_c] = sample_validation(log.traces(), 0.2, rng3);

  std::set<std::string> ids;
  for (const auto& t : fit_a) ids.insert(t.case_id);
  for (const auto& t : val_a) CHECK(ids.count(t.case_id) == 0);
  CHECK(fit_a.size() + val_a.size() == 100);

  auto id_list = [](const std::vector<Trace>& v) {
    std::vector<std::string> out;
    for (const auto& t : v) out.push_back(t.case_id);
    return out;
  };
  CHECK(id_list(fit_a) == id_list(fit_b));
  CHECK(id_list(val_a) == id_list(val_b));
  CHECK(id_list(val_a) != id_list(val_c));
}

TEST_CASE("gain formula on a reference accuracy row") {
  // reference inputs 0.603 / 0.964 / 0.965 / 0.964
  CHECK(std::round(gain_formula(0.964, 0.603) * 1000.0) / 1000.0 == doctest::Approx(0.599));
  CHECK(std::round(gain_formula(0.965, 0.603) * 1000.0) / 1000.0 == doctest::Approx(0.600));
  CHECK(gain_formula(0.603, 0.603) == doctest::Approx(0.0));
}

TEST_CASE("experiment config JSON round trip") {
  ExperimentConfig cfg;
  cfg.log_path = "somewhere.xes";
  cfg.labeler.kind = LabelerSpec::Kind::Ltl;
  cfg.labeler.formula_text = "F(\"Close case\")";
  cfg.split_setting = SplitSetting::B();
  cfg.max_prefix_len = 12;
  cfg.hyperopt.budget = 7;
  cfg.hyperopt.tpe.n_startup = 3;
  cfg.seed = 99;
  ExperimentConfig round = ExperimentConfig::from_json_text(cfg.to_json_text());
  CHECK(round.log_path == cfg.log_path);
  CHECK(round.labeler.kind == LabelerSpec::Kind::Ltl);
  CHECK(round.labeler.formula_text == cfg.labeler.formula_text);
  CHECK(round.split_setting.tr0 == doctest::Approx(0.40));
  CHECK(round.max_prefix_len == 12);
  CHECK(round.hyperopt.budget == 7);
  CHECK(round.hyperopt.tpe.n_startup == 3);
  CHECK(round.seed == 99);
  CHECK(round.hyperopt.batch_space.params.size() == 4);
  CHECK(round.hyperopt.inc_space.params.size() == 5);
}

TEST_CASE("degenerate S1: empty TR1 reproduces M0 exactly") {
  EventLog log = generated_log(120, 6);
  std::vector<Trace> tr0 = split(log, SplitSetting::custom(0.5, 0.3, 0.2)).tr0;

  // S0 side
  Rng rng_a(77);
  auto [fit_a, val_a] = sample_validation(tr0, 0.2, rng_a);
  auto schema_a = std::make_shared<const EncodingSchema>(EncodingSchema::fit(fit_a, 6));
  std::map<std::string, bool> labels;
  for (const auto& t : log.traces()) labels[t.case_id] = t.events.size() > 10;
  EncodedDataset d_a = encode_set(fit_a, schema_a, labels, 6);
  BatchHyperparameters hp;
  hp.n_trees = 9;
  hp.max_depth = 4;
  Model m0(BatchForest::train(d_a, hp, 4242));

  // S1 side with TR1 = {}: same validation seed, same train seed
  std::vector<Trace> tr01 = tr0;  // union with the empty set
  Rng rng_b(77);
  auto [fit_b, val_b] = sample_validation(tr01, 0.2, rng_b);
  auto schema_b = std::make_shared<const EncodingSchema>(EncodingSchema::fit(fit_b, 6));
  EncodedDataset d_b = encode_set(fit_b, schema_b, labels, 6);
  Model m1(BatchForest::train(d_b, hp, 4242));

  CHECK(m0.serialize() == m1.serialize());
}

TEST_CASE("run_all produces a consistent report on a small log") {
  GeneratorConfig gen;
  gen.n_cases = 260;
  gen.seed = 31;
  EventLog log = generate(gen);

  ExperimentConfig cfg;
  cfg.labeler.kind = LabelerSpec::Kind::FastCase;
  cfg.split_setting = SplitSetting::A();
  cfg.max_prefix_len = 8;
  cfg.hyperopt.budget = 4;
  cfg.hyperopt.tpe.n_startup = 2;
  cfg.validation_fraction = 0.2;
  cfg.seed = 7;
  cfg.threads = 2;

  std::string out_dir = (std::filesystem::temp_directory_path() / "ppmbench_harness_test").string();
  std::filesystem::remove_all(out_dir);
  ExperimentReport report = run_all(log, cfg, out_dir);

  // accounting identities
  const auto& s0 = report.strategies[0];
  const auto& s1 = report.strategies[1];
  const auto& s2 = report.strategies[2];
  const auto& s3 = report.strategies[3];
  CHECK(s0.time.total(Strategy::S0) == doctest::Approx(s0.time.m0_build));
  CHECK(s1.time.total(Strategy::S1) - s0.time.total(Strategy::S0) == doctest::Approx(s1.time.retrain));
  CHECK(s2.time.total(Strategy::S2) ==
        doctest::Approx(s2.time.m0_build + s2.time.hyperopt + s2.time.retrain));
  CHECK(s3.time.total(Strategy::S3) ==
        doctest::Approx(s3.time.m0_build + s3.time.incremental_update));
  CHECK(s1.time.m0_build == s0.time.m0_build);

  // S1 reuses M0's hyperparameters verbatim
  CHECK(s1.hyperparameters == s0.hyperparameters);

  // gains: M0 row is zero by definition
  CHECK(report.gain_vs_m0(Strategy::S0) == doctest::Approx(0.0));

  // metrics in range
  for (const auto& s : report.strategies) {
    CHECK(s.auc >= 0.0);
    CHECK(s.auc <= 1.0);
    CHECK(s.f1 >= 0.0);
    CHECK(s.f1 <= 1.0);
    CHECK(s.accuracy >= 0.0);
    CHECK(s.accuracy <= 1.0);
    CHECK_FALSE(s.schema_fingerprint.empty());
  }

  // hyperopt ran where expected
  CHECK(s0.trials.size() == 4);
  CHECK(s1.trials.empty());
  CHECK(s2.trials.size() == 4);
  CHECK(report.inc_trials.size() == 4);
  CHECK(report.fastcase_threshold_seconds.has_value());

  // files written and parseable
  CHECK(std::filesystem::exists(out_dir + "/report.json"));
  CHECK(std::filesystem::exists(out_dir + "/report.csv"));
  CHECK(std::filesystem::exists(out_dir + "/gains.csv"));
  CHECK(std::filesystem::exists(out_dir + "/trials_s0.csv"));
  CHECK(std::filesystem::exists(out_dir + "/trials_s2.csv"));
  CHECK(std::filesystem::exists(out_dir + "/trials_inc.csv"));
  {
    std::ifstream trials_in(out_dir + "/trials_s0.csv");
    std::string header;
    std::getline(trials_in, header);
    CHECK(header ==
          "iteration,n_trees,max_depth,min_samples_leaf,max_features_fraction,objective,seconds,"
          "failed");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(trials_in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == cfg.hyperopt.budget);
  }
  std::ifstream json_in(out_dir + "/report.json");
  std::string json_text((std::istreambuf_iterator<char>(json_in)), std::istreambuf_iterator<char>());
  CHECK(json_text.find("\"strategies\"") != std::string::npos);
  std::ifstream csv_in(out_dir + "/report.csv");
  std::string csv_line;
  std::getline(csv_in, csv_line);
  CHECK(csv_line == "strategy,auc,f1,accuracy,m0_build_s,retrain_s,hyperopt_s,update_s,total_s");

  // determinism of the whole experiment under a fixed seed
  ExperimentReport again = run_all(log, cfg);
  for (int i = 0; i < 4; ++i) {
    CHECK(again.strategies[i].auc == report.strategies[i].auc);
    CHECK(again.strategies[i].hyperparameters == report.strategies[i].hyperparameters);
  }
  std::filesystem::remove_all(out_dir);
}

TEST_CASE("ltl labeling drives the experiment end to end") {
  GeneratorConfig gen;
  gen.n_cases = 200;
  gen.seed = 33;
  EventLog log = generate(gen);

  ExperimentConfig cfg;
  cfg.labeler.kind = LabelerSpec::Kind::Ltl;
  cfg.labeler.formula_text = "F(\"Reject application\")";
  cfg.max_prefix_len = 6;
  cfg.hyperopt.budget = 3;
  cfg.hyperopt.tpe.n_startup = 2;
  cfg.seed = 3;
  cfg.threads = 2;

  ExperimentReport report = run_all(log, cfg);
  CHECK_FALSE(report.fastcase_threshold_seconds.has_value());
  for (const auto& s : report.strategies) {
    CHECK(s.auc > 0.0);
    CHECK(s.auc <= 1.0);
  }
}

TEST_CASE("failures leave a partial report dump") {
  EventLog log = generated_log(50, 35);
  ExperimentConfig cfg;
  cfg.labeler.kind = LabelerSpec::Kind::Ltl;
  cfg.labeler.formula_text = "F(";  // malformed on purpose
  std::string out_dir = (std::filesystem::temp_directory_path() / "ppmbench_partial_test").string();
  std::filesystem::remove_all(out_dir);
  CHECK_THROWS_AS(run_all(log, cfg, out_dir), Error);
  CHECK(std::filesystem::exists(out_dir + "/report.partial.json"));
  std::filesystem::remove_all(out_dir);
}
