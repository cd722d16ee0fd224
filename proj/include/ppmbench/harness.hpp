#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppmbench/encoding.hpp"
#include "ppmbench/eventlog.hpp"
#include "ppmbench/forest.hpp"
#include "ppmbench/hyperopt.hpp"
#include "ppmbench/metrics.hpp"
#include "ppmbench/outcome.hpp"

namespace ppmbench {

struct SplitSetting {
  double tr0 = 0.10;
  double tr1 = 0.70;
  double te = 0.20;

  static SplitSetting A() { return {0.10, 0.70, 0.20}; }
  static SplitSetting B() { return {0.40, 0.40, 0.20}; }
  static SplitSetting custom(double tr0, double tr1, double te);
  void validate() const;
};

struct Split {
  std::vector<Trace> tr0;
  std::vector<Trace> tr1;
  std::vector<Trace> te;
};

// Traces sorted by start time (stable), contiguous slices with floor rounding,
// remainder assigned to the most recent block (TE).
Split split(const EventLog& log, const SplitSetting& setting);

// Uniform sampling without replacement; |val| = round(fraction * |traces|).
std::pair<std::vector<Trace>, std::vector<Trace>> sample_validation(
    const std::vector<Trace>& traces, double fraction, Rng& rng);

struct LabelerSpec {
  enum class Kind { Ltl, FastCase };
  Kind kind = Kind::FastCase;
  std::string formula_text;  // Ltl only
};

SearchSpace default_batch_space();
SearchSpace default_inc_space();

struct HyperoptConfig {
  std::size_t budget = 50;
  TpeOptions tpe;
  SearchSpace batch_space = default_batch_space();
  SearchSpace inc_space = default_inc_space();
};

struct ExperimentConfig {
  std::string log_path;  // informational; the log itself is passed to run_all
  LabelerSpec labeler;
  SplitSetting split_setting = SplitSetting::A();
  std::size_t max_prefix_len = 20;
  HyperoptConfig hyperopt;
  double validation_fraction = 0.20;
  std::uint64_t seed = 42;
  int threads = 0;  // 0: hardware concurrency

  static ExperimentConfig from_json_text(std::string_view text);
  std::string to_json_text() const;
};

struct StrategyResult {
  Strategy strategy = Strategy::S0;
  double auc = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::vector<std::pair<std::size_t, double>> per_prefix_auc;  // NaN when single-class
  TimeBreakdown time;
  Params hyperparameters;
  std::string schema_fingerprint;
  std::vector<Trial> trials;  // hyperopt history where one ran
};

struct ExperimentReport {
  std::string config_echo_json;
  std::array<StrategyResult, 4> strategies;
  // S3 baseline detail: the incremental model has its own hyperopt on TR0
  double inc_baseline_auc = 0.0;
  double inc_baseline_build_seconds = 0.0;
  Params inc_baseline_params;
  std::vector<Trial> inc_trials;
  std::optional<double> fastcase_threshold_seconds;

  double gain_vs_m0(Strategy s) const;  // (Mi - M0) / M0 on AUC

  std::string to_json_text() const;
  std::string report_csv() const;
  std::string gains_csv() const;
};

// iteration, one column per parameter, objective, seconds, failed
std::string trials_csv(const std::vector<Trial>& trials, const SearchSpace& space);

double gain_formula(double mi, double m0);

// Executes split, gold labeling, S0-S3, gains; when out_dir is non-empty the
// report files are written there (a partial dump is left behind on failure).
ExperimentReport run_all(const EventLog& log, const ExperimentConfig& cfg,
                         const std::string& out_dir = "");

}  // namespace ppmbench
