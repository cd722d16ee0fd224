#include "ppmbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "ppmbench/error.hpp"

namespace ppmbench {

using nlohmann::json;

SplitSetting SplitSetting::custom(double tr0, double tr1, double te) {
  SplitSetting s{tr0, tr1, te};
  s.validate();
  return s;
}

void SplitSetting::validate() const {
  if (!(tr0 > 0.0 && tr1 > 0.0 && te > 0.0))
    throw Error("split fractions must be positive");
  if (std::abs(tr0 + tr1 + te - 1.0) > 1e-9) throw Error("split fractions must sum to 1");
}

Split split(const EventLog& log, const SplitSetting& setting) {
  setting.validate();
  if (log.traces().size() < 10) throw Error("log too small to split (need >= 10 traces)");

  std::vector<Trace> ordered = log.traces();
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Trace& a, const Trace& b) { return a.start_time() < b.start_time(); });

  std::size_t n = ordered.size();
  std::size_t n0 = static_cast<std::size_t>(std::floor(setting.tr0 * static_cast<double>(n)));
  std::size_t n1 = static_cast<std::size_t>(std::floor(setting.tr1 * static_cast<double>(n)));
  if (n0 == 0 || n1 == 0 || n0 + n1 >= n) throw Error("log too small for non-empty split slices");

  Split result;
  result.tr0.assign(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(n0));
  result.tr1.assign(ordered.begin() + static_cast<std::ptrdiff_t>(n0),
                    ordered.begin() + static_cast<std::ptrdiff_t>(n0 + n1));
  result.te.assign(ordered.begin() + static_cast<std::ptrdiff_t>(n0 + n1), ordered.end());
  return result;
}

std::pair<std::vector<Trace>, std::vector<Trace>> sample_validation(
    const std::vector<Trace>& traces, double fraction, Rng& rng) {
  if (traces.size() < 5) throw Error("train set too small for validation sampling (need >= 5)");
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error("validation fraction must be in (0,1)");

  std::size_t n = traces.size();
  std::size_t n_val =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  n_val = std::clamp<std::size_t>(n_val, 1, n - 1);

  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  for (std::size_t i = 0; i < n_val; ++i) {  // partial Fisher-Yates
    std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
    std::swap(indices[i], indices[j]);
  }
  std::vector<bool> in_val(n, false);
  for (std::size_t i = 0; i < n_val; ++i) in_val[indices[i]] = true;

  std::pair<std::vector<Trace>, std::vector<Trace>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_val[i]) out.second.push_back(traces[i]);
    else out.first.push_back(traces[i]);
  }
  return out;
}

SearchSpace default_batch_space() {
  SearchSpace s;
  s.params = {
      {"n_trees", ParamSpec::Kind::Int, 10, 500, true},
      {"max_depth", ParamSpec::Kind::Int, 2, 30, false},
      {"min_samples_leaf", ParamSpec::Kind::Int, 1, 50, true},
      {"max_features_fraction", ParamSpec::Kind::Real, 0.05, 1.0, false},
  };
  return s;
}

SearchSpace default_inc_space() {
  SearchSpace s;
  s.params = {
      {"n_trees", ParamSpec::Kind::Int, 5, 100, true},
      {"grace_period", ParamSpec::Kind::Int, 50, 1000, true},
      {"split_confidence", ParamSpec::Kind::Real, 1e-7, 1e-2, true},
      {"tie_threshold", ParamSpec::Kind::Real, 0.01, 0.2, false},
      {"max_features_fraction", ParamSpec::Kind::Real, 0.05, 1.0, false},
  };
  return s;
}

namespace {

BatchHyperparameters batch_hp_from(const Params& p) {
  BatchHyperparameters hp;
  hp.n_trees = static_cast<int>(std::llround(p.at("n_trees")));
  hp.max_depth = static_cast<int>(std::llround(p.at("max_depth")));
  hp.min_samples_leaf = static_cast<int>(std::llround(p.at("min_samples_leaf")));
  hp.max_features_fraction = p.at("max_features_fraction");
  return hp;
}

IncHyperparameters inc_hp_from(const Params& p) {
  IncHyperparameters hp;
  hp.n_trees = static_cast<int>(std::llround(p.at("n_trees")));
  hp.grace_period = static_cast<int>(std::llround(p.at("grace_period")));
  hp.split_confidence = p.at("split_confidence");
  hp.tie_threshold = p.at("tie_threshold");
  hp.max_features_fraction = p.at("max_features_fraction");
  return hp;
}

template <typename Predictor>
std::vector<Scored> score_dataset(const Predictor& model, const EncodedDataset& dataset) {
  std::vector<Scored> scored;
  scored.reserve(dataset.instances.size());
  for (const auto& inst : dataset.instances)
    scored.push_back({model.predict(inst.features), inst.label});
  return scored;
}

struct Evaluation {
  double auc_value = 0.0;
  double f1 = 0.0;
  double acc = 0.0;
  std::vector<std::pair<std::size_t, double>> per_prefix;
};

Evaluation evaluate_scores(const std::vector<Scored>& scored, const EncodedDataset& dataset) {
  Evaluation ev;
  ev.auc_value = auc(scored);
  ev.f1 = f_measure(scored);
  ev.acc = accuracy(scored);
  std::map<std::size_t, std::vector<Scored>> by_len;
  for (std::size_t i = 0; i < scored.size(); ++i)
    by_len[dataset.instances[i].prefix_len].push_back(scored[i]);
  for (const auto& [len, group] : by_len) {
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      value = auc(group);
    } catch (const Error&) {
      // single-class bucket; reported as null
    }
    ev.per_prefix.emplace_back(len, value);
  }
  return ev;
}

json space_to_json(const SearchSpace& space) {
  json arr = json::array();
  for (const auto& p : space.params) {
    arr.push_back({{"name", p.name},
                   {"kind", p.kind == ParamSpec::Kind::Int ? "int" : "real"},
                   {"lo", p.lo},
                   {"hi", p.hi},
                   {"scale", p.log_scale ? "log" : "linear"}});
  }
  return arr;
}

SearchSpace space_from_json(const json& arr) {
  SearchSpace s;
  for (const auto& p : arr) {
    ParamSpec spec;
    spec.name = p.at("name").get<std::string>();
    spec.kind = p.at("kind").get<std::string>() == "int" ? ParamSpec::Kind::Int : ParamSpec::Kind::Real;
    spec.lo = p.at("lo").get<double>();
    spec.hi = p.at("hi").get<double>();
    spec.log_scale = p.at("scale").get<std::string>() == "log";
    s.params.push_back(std::move(spec));
  }
  s.validate();
  return s;
}

json params_to_json(const Params& p) {
  json obj = json::object();
  for (const auto& [k, v] : p) obj[k] = v;
  return obj;
}

json trials_to_json(const std::vector<Trial>& trials) {
  json arr = json::array();
  std::size_t i = 0;
  for (const auto& t : trials) {
    arr.push_back({{"iteration", i++},
                   {"params", params_to_json(t.params)},
                   {"objective", t.objective},
                   {"seconds", t.seconds},
                   {"failed", t.failed}});
  }
  return arr;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid experiment config JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.log_path = j.value("log", "");
    if (j.contains("labeler")) {
      const auto& l = j.at("labeler");
      std::string type = l.at("type").get<std::string>();
      if (type == "ltl") {
        cfg.labeler.kind = LabelerSpec::Kind::Ltl;
        cfg.labeler.formula_text = l.at("formula").get<std::string>();
      } else if (type == "fast_case") {
        cfg.labeler.kind = LabelerSpec::Kind::FastCase;
      } else {
        throw Error("labeler type must be 'ltl' or 'fast_case'");
      }
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      std::string type = s.value("type", "A");
      if (type == "A") cfg.split_setting = SplitSetting::A();
      else if (type == "B") cfg.split_setting = SplitSetting::B();
      else if (type == "custom")
        cfg.split_setting = SplitSetting::custom(s.at("tr0").get<double>(), s.at("tr1").get<double>(),
                                                 s.at("te").get<double>());
      else throw Error("split type must be 'A', 'B' or 'custom'");
    }
    cfg.max_prefix_len = j.value("max_prefix_len", std::size_t{20});
    if (j.contains("hyperopt")) {
      const auto& h = j.at("hyperopt");
      cfg.hyperopt.budget = h.value("budget", std::size_t{50});
      cfg.hyperopt.tpe.n_startup = h.value("startup", std::size_t{20});
      cfg.hyperopt.tpe.gamma = h.value("gamma", 0.25);
      cfg.hyperopt.tpe.n_candidates = h.value("candidates", std::size_t{24});
      if (h.contains("batch_space")) cfg.hyperopt.batch_space = space_from_json(h.at("batch_space"));
      if (h.contains("inc_space")) cfg.hyperopt.inc_space = space_from_json(h.at("inc_space"));
    }
    cfg.validation_fraction = j.value("validation_fraction", 0.20);
    cfg.seed = j.value("seed", std::uint64_t{42});
    cfg.threads = j.value("threads", 0);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid experiment config JSON: ") + e.what());
  }
  if (cfg.hyperopt.batch_space.params.empty()) cfg.hyperopt.batch_space = default_batch_space();
  if (cfg.hyperopt.inc_space.params.empty()) cfg.hyperopt.inc_space = default_inc_space();
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0))
    throw Error("validation_fraction must be in (0,1)");
  return cfg;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["log"] = log_path;
  j["labeler"] = {{"type", labeler.kind == LabelerSpec::Kind::Ltl ? "ltl" : "fast_case"}};
  if (labeler.kind == LabelerSpec::Kind::Ltl) j["labeler"]["formula"] = labeler.formula_text;
  j["split"] = {{"type", "custom"},
                {"tr0", split_setting.tr0},
                {"tr1", split_setting.tr1},
                {"te", split_setting.te}};
  j["max_prefix_len"] = max_prefix_len;
  j["hyperopt"] = {{"budget", hyperopt.budget},
                   {"startup", hyperopt.tpe.n_startup},
                   {"gamma", hyperopt.tpe.gamma},
                   {"candidates", hyperopt.tpe.n_candidates},
                   {"batch_space", space_to_json(hyperopt.batch_space.params.empty()
                                                     ? default_batch_space()
                                                     : hyperopt.batch_space)},
                   {"inc_space", space_to_json(hyperopt.inc_space.params.empty()
                                                   ? default_inc_space()
                                                   : hyperopt.inc_space)}};
  j["validation_fraction"] = validation_fraction;
  j["seed"] = seed;
  j["threads"] = threads;
  return j.dump(2);
}

double gain_formula(double mi, double m0) {
  if (m0 == 0.0) throw Error("gain undefined for M0 = 0");
  return (mi - m0) / m0;
}

double ExperimentReport::gain_vs_m0(Strategy s) const {
  double m0 = strategies[0].auc;
  double mi = strategies[static_cast<std::size_t>(s)].auc;
  return gain_formula(mi, m0);
}

namespace {

json report_to_json(const ExperimentReport& report) {
  json j;
  j["config"] = json::parse(report.config_echo_json);
  if (report.fastcase_threshold_seconds)
    j["fastcase_threshold_seconds"] = *report.fastcase_threshold_seconds;
  j["prefix_policy"] = "single model over all prefix lengths with PAD columns";
  json strategies = json::array();
  for (const auto& s : report.strategies) {
    json per_prefix = json::array();
    for (const auto& [len, value] : s.per_prefix_auc) {
      json entry = {{"prefix_len", len}};
      if (std::isnan(value)) entry["auc"] = nullptr;
      else entry["auc"] = value;
      per_prefix.push_back(entry);
    }
    strategies.push_back({{"strategy", strategy_name(s.strategy)},
                          {"auc", s.auc},
                          {"f1", s.f1},
                          {"accuracy", s.accuracy},
                          {"per_prefix_auc", per_prefix},
                          {"time", {{"m0_build_s", s.time.m0_build},
                                    {"retrain_s", s.time.retrain},
                                    {"hyperopt_s", s.time.hyperopt},
                                    {"update_s", s.time.incremental_update},
                                    {"total_s", s.time.total(s.strategy)}}},
                          {"hyperparameters", params_to_json(s.hyperparameters)},
                          {"schema_fingerprint", s.schema_fingerprint},
                          {"trials", trials_to_json(s.trials)}});
  }
  j["strategies"] = strategies;
  j["gains_vs_m0"] = {{"S1", report.gain_vs_m0(Strategy::S1)},
                      {"S2", report.gain_vs_m0(Strategy::S2)},
                      {"S3", report.gain_vs_m0(Strategy::S3)}};
  j["inc_baseline"] = {{"auc", report.inc_baseline_auc},
                       {"build_s", report.inc_baseline_build_seconds},
                       {"hyperparameters", params_to_json(report.inc_baseline_params)},
                       {"trials", trials_to_json(report.inc_trials)}};
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string ExperimentReport::to_json_text() const { return report_to_json(*this).dump(2); }

std::string ExperimentReport::report_csv() const {
  std::string out = "strategy,auc,f1,accuracy,m0_build_s,retrain_s,hyperopt_s,update_s,total_s\n";
  for (const auto& s : strategies) {
    out += strategy_name(s.strategy);
    out += "," + format_double(s.auc) + "," + format_double(s.f1) + "," + format_double(s.accuracy);
    out += "," + format_double(s.time.m0_build) + "," + format_double(s.time.retrain);
    out += "," + format_double(s.time.hyperopt) + "," + format_double(s.time.incremental_update);
    out += "," + format_double(s.time.total(s.strategy)) + "\n";
  }
  return out;
}

std::string ExperimentReport::gains_csv() const {
  std::string out = "model,auc,gain_vs_m0\n";
  const char* names[4] = {"M0", "M1", "M2", "M3"};
  for (std::size_t i = 0; i < 4; ++i) {
    double gain = i == 0 ? 0.0 : gain_vs_m0(static_cast<Strategy>(i));
    out += std::string(names[i]) + "," + format_double(strategies[i].auc) + "," +
           format_double(gain) + "\n";
  }
  return out;
}

std::string trials_csv(const std::vector<Trial>& trials, const SearchSpace& space) {
  std::string out = "iteration";
  for (const auto& p : space.params) out += "," + p.name;
  out += ",objective,seconds,failed\n";
  std::size_t i = 0;
  for (const auto& t : trials) {
    out += std::to_string(i++);
    for (const auto& p : space.params) {
      auto it = t.params.find(p.name);
      out += "," + (it != t.params.end() ? format_double(it->second) : std::string());
    }
    out += "," + format_double(t.objective) + "," + format_double(t.seconds) + "," +
           (t.failed ? "1" : "0") + "\n";
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

}  // namespace

ExperimentReport run_all(const EventLog& log, const ExperimentConfig& cfg,
                         const std::string& out_dir) {
  ExperimentReport report;
  report.config_echo_json = cfg.to_json_text();

  try {
    Split parts = split(log, cfg.split_setting);

    // gold-standard labeling from complete traces; the fast-case threshold is
    // frozen from the full training portion (TR0 u TR1) before testing
    OutcomeLabeler labeler = [&]() {
      if (cfg.labeler.kind == LabelerSpec::Kind::Ltl)
        return OutcomeLabeler::ltl(parse_formula(cfg.labeler.formula_text));
      std::vector<Trace> train;
      train.reserve(parts.tr0.size() + parts.tr1.size());
      train.insert(train.end(), parts.tr0.begin(), parts.tr0.end());
      train.insert(train.end(), parts.tr1.begin(), parts.tr1.end());
      double sum = 0.0;
      for (const auto& t : train) sum += t.cycle_time_seconds();
      double threshold = sum / static_cast<double>(train.size());
      report.fastcase_threshold_seconds = threshold;
      return OutcomeLabeler::fast_case_threshold(threshold);
    }();
    std::map<std::string, bool> labels = label_log(log, labeler);

    const std::uint64_t val_seed = mix_seed(cfg.seed, 1);
    const std::uint64_t hp0_seed = mix_seed(cfg.seed, 2);
    const std::uint64_t hp2_seed = mix_seed(cfg.seed, 3);
    const std::uint64_t hpinc_seed = mix_seed(cfg.seed, 4);
    const std::uint64_t train_seed = mix_seed(cfg.seed, 5);
    const std::size_t cap = cfg.max_prefix_len;

    // ---------------------------------------------------------------- S0
    Rng rng_val0(val_seed);
    auto [fit0, val0] = sample_validation(parts.tr0, cfg.validation_fraction, rng_val0);
    auto schema0 = std::make_shared<const EncodingSchema>(EncodingSchema::fit(fit0, cap));
    EncodedDataset d_fit0 = encode_set(fit0, schema0, labels, cap);
    EncodedDataset d_val0 = encode_set(val0, schema0, labels, cap);

    auto batch_objective = [&cfg, train_seed](const EncodedDataset* fit_set,
                                              const EncodedDataset* val_set) {
      return [&cfg, train_seed, fit_set, val_set](const Params& p) {
        BatchForest forest = BatchForest::train(*fit_set, batch_hp_from(p), train_seed, cfg.threads);
        return auc(score_dataset(forest, *val_set));
      };
    };

    Stopwatch sw_hp0;
    sw_hp0.start();
    OptimizeResult hp0 = optimize(batch_objective(&d_fit0, &d_val0), cfg.hyperopt.batch_space,
                                  cfg.hyperopt.budget, hp0_seed, cfg.hyperopt.tpe);
    sw_hp0.stop();

    Stopwatch sw_train0;
    sw_train0.start();
    BatchForest m0 = BatchForest::train(d_fit0, batch_hp_from(hp0.best_params), train_seed,
                                        cfg.threads);
    sw_train0.stop();
    const double m0_build = sw_hp0.seconds() + sw_train0.seconds();

    EncodedDataset d_te0 = encode_set(parts.te, schema0, labels, cap);
    {
      Evaluation ev = evaluate_scores(score_dataset(m0, d_te0), d_te0);
      StrategyResult& r = report.strategies[0];
      r.strategy = Strategy::S0;
      r.auc = ev.auc_value;
      r.f1 = ev.f1;
      r.accuracy = ev.acc;
      r.per_prefix_auc = ev.per_prefix;
      r.time.m0_build = m0_build;
      r.hyperparameters = hp0.best_params;
      r.schema_fingerprint = schema0->fingerprint();
      r.trials = hp0.trials;
    }

    // ---------------------------------------------------------------- S1/S2 shared split
    std::vector<Trace> tr01;
    tr01.reserve(parts.tr0.size() + parts.tr1.size());
    tr01.insert(tr01.end(), parts.tr0.begin(), parts.tr0.end());
    tr01.insert(tr01.end(), parts.tr1.begin(), parts.tr1.end());
    Rng rng_val01(val_seed);
    auto [fit01, val01] = sample_validation(tr01, cfg.validation_fraction, rng_val01);
    auto schema01 = std::make_shared<const EncodingSchema>(EncodingSchema::fit(fit01, cap));
    EncodedDataset d_fit01 = encode_set(fit01, schema01, labels, cap);
    EncodedDataset d_val01 = encode_set(val01, schema01, labels, cap);
    EncodedDataset d_te01 = encode_set(parts.te, schema01, labels, cap);

    // ---------------------------------------------------------------- S1
    {
      Stopwatch sw_retrain;
      sw_retrain.start();
      BatchForest m1 = BatchForest::train(d_fit01, batch_hp_from(hp0.best_params), train_seed,
                                          cfg.threads);
      sw_retrain.stop();
      Evaluation ev = evaluate_scores(score_dataset(m1, d_te01), d_te01);
      StrategyResult& r = report.strategies[1];
      r.strategy = Strategy::S1;
      r.auc = ev.auc_value;
      r.f1 = ev.f1;
      r.accuracy = ev.acc;
      r.per_prefix_auc = ev.per_prefix;
      r.time.m0_build = m0_build;
      r.time.retrain = sw_retrain.seconds();
      r.hyperparameters = hp0.best_params;  // reused verbatim
      r.schema_fingerprint = schema01->fingerprint();
    }

    // ---------------------------------------------------------------- S2
    {
      Stopwatch sw_hp2;
      sw_hp2.start();
      OptimizeResult hp2 = optimize(batch_objective(&d_fit01, &d_val01), cfg.hyperopt.batch_space,
                                    cfg.hyperopt.budget, hp2_seed, cfg.hyperopt.tpe);
      sw_hp2.stop();
      Stopwatch sw_train2;
      sw_train2.start();
      BatchForest m2 = BatchForest::train(d_fit01, batch_hp_from(hp2.best_params), train_seed,
                                          cfg.threads);
      sw_train2.stop();
      Evaluation ev = evaluate_scores(score_dataset(m2, d_te01), d_te01);
      StrategyResult& r = report.strategies[2];
      r.strategy = Strategy::S2;
      r.auc = ev.auc_value;
      r.f1 = ev.f1;
      r.accuracy = ev.acc;
      r.per_prefix_auc = ev.per_prefix;
      r.time.m0_build = m0_build;
      r.time.hyperopt = sw_hp2.seconds();
      r.time.retrain = sw_train2.seconds();
      r.hyperparameters = hp2.best_params;
      r.schema_fingerprint = schema01->fingerprint();
      r.trials = hp2.trials;
    }

    // ---------------------------------------------------------------- S3
    {
      auto inc_objective = [&](const Params& p) {
        IncrementalForest forest =
            IncrementalForest::train_initial(d_fit0, inc_hp_from(p), train_seed, cfg.threads);
        return auc(score_dataset(forest, d_val0));
      };
      Stopwatch sw_hpinc;
      sw_hpinc.start();
      OptimizeResult hpinc = optimize(inc_objective, cfg.hyperopt.inc_space, cfg.hyperopt.budget,
                                      hpinc_seed, cfg.hyperopt.tpe);
      sw_hpinc.stop();
      Stopwatch sw_train_inc;
      sw_train_inc.start();
      IncrementalForest m0_inc = IncrementalForest::train_initial(
          d_fit0, inc_hp_from(hpinc.best_params), train_seed, cfg.threads);
      sw_train_inc.stop();

      report.inc_baseline_auc = auc(score_dataset(m0_inc, d_te0));
      report.inc_baseline_build_seconds = sw_hpinc.seconds() + sw_train_inc.seconds();
      report.inc_baseline_params = hpinc.best_params;
      report.inc_trials = hpinc.trials;

      EncodedDataset d_tr1 = encode_set(parts.tr1, schema0, labels, cap);
      Stopwatch sw_update;
      sw_update.start();
      m0_inc.update(d_tr1.instances, cfg.threads);
      sw_update.stop();

      Evaluation ev = evaluate_scores(score_dataset(m0_inc, d_te0), d_te0);
      StrategyResult& r = report.strategies[3];
      r.strategy = Strategy::S3;
      r.auc = ev.auc_value;
      r.f1 = ev.f1;
      r.accuracy = ev.acc;
      r.per_prefix_auc = ev.per_prefix;
      r.time.m0_build = m0_build;
      r.time.incremental_update = sw_update.seconds();
      r.hyperparameters = hpinc.best_params;  // unchanged by the update
      r.schema_fingerprint = schema0->fingerprint();
    }
  } catch (const std::exception& e) {
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      json partial;
      partial["error"] = e.what();
      partial["config"] = json::parse(report.config_echo_json);
      write_file(out_dir + "/report.partial.json", partial.dump(2));
    }
    throw;
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/report.json", report.to_json_text());
    write_file(out_dir + "/report.csv", report.report_csv());
    write_file(out_dir + "/gains.csv", report.gains_csv());
    write_file(out_dir + "/trials_s0.csv", trials_csv(report.strategies[0].trials,
                                                      cfg.hyperopt.batch_space));
    write_file(out_dir + "/trials_s2.csv", trials_csv(report.strategies[2].trials,
                                                      cfg.hyperopt.batch_space));
    write_file(out_dir + "/trials_inc.csv", trials_csv(report.inc_trials, cfg.hyperopt.inc_space));
  }
  return report;
}

}  // namespace ppmbench
