#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppmbench/driftgen.hpp"
#include "ppmbench/error.hpp"
#include "ppmbench/harness.hpp"
#include "ppmbench/timeutil.hpp"

using namespace ppmbench;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

EventLog load_log(const std::string& path, const std::string& csv_mapping_path) {
  std::string bytes = read_file(path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    if (csv_mapping_path.empty()) throw Error("CSV logs need --csv-mapping");
    return parse_csv(bytes, CsvMapping::from_json(read_file(csv_mapping_path)));
  }
  return parse_xes(bytes);
}

GeneratorConfig generator_config_from_json_obj(const json& j) {
  GeneratorConfig cfg;
  cfg.n_cases = j.value("n_cases", cfg.n_cases);
  cfg.drift_at_fraction = j.value("drift_at_fraction", cfg.drift_at_fraction);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.mean_interarrival_minutes = j.value("mean_interarrival_minutes", cfg.mean_interarrival_minutes);
  cfg.case_speed_sigma_log = j.value("case_speed_sigma_log", cfg.case_speed_sigma_log);
  cfg.start_epoch_millis = j.value("start_epoch_millis", cfg.start_epoch_millis);
  if (j.contains("drift")) {
    const auto& d = j.at("drift");
    if (d.contains("resequentialize")) {
      cfg.drift.resequentialize = {d.at("resequentialize").at(0).get<std::string>(),
                                   d.at("resequentialize").at(1).get<std::string>()};
    }
    cfg.drift.insert_activity = d.value("insert_activity", cfg.drift.insert_activity);
    cfg.drift.insert_after = d.value("insert_after", cfg.drift.insert_after);
    cfg.drift.optionalize = d.value("optionalize", cfg.drift.optionalize);
    cfg.drift.optional_probability = d.value("optional_probability", cfg.drift.optional_probability);
    if (d.contains("slow_down")) {
      cfg.drift.slow_down = {d.at("slow_down").at(0).get<std::string>(),
                             d.at("slow_down").at(1).get<std::string>()};
    }
    cfg.drift.duration_multiplier = d.value("duration_multiplier", cfg.drift.duration_multiplier);
  }
  return cfg;
}

GeneratorConfig generator_config_from_json(const std::string& text) {
  return generator_config_from_json_obj(json::parse(text));
}

json generator_config_echo(const GeneratorConfig& cfg) {
  return {{"n_cases", cfg.n_cases},
          {"drift_at_fraction", cfg.drift_at_fraction},
          {"seed", cfg.seed},
          {"mean_interarrival_minutes", cfg.mean_interarrival_minutes},
          {"case_speed_sigma_log", cfg.case_speed_sigma_log},
          {"start_epoch_millis", cfg.start_epoch_millis},
          {"drift",
           {{"resequentialize", {cfg.drift.resequentialize.first, cfg.drift.resequentialize.second}},
            {"insert_activity", cfg.drift.insert_activity},
            {"insert_after", cfg.drift.insert_after},
            {"optionalize", cfg.drift.optionalize},
            {"optional_probability", cfg.drift.optional_probability},
            {"slow_down", {cfg.drift.slow_down.first, cfg.drift.slow_down.second}},
            {"duration_multiplier", cfg.drift.duration_multiplier}}}};
}

int default_threads() {
  if (const char* env = std::getenv("PPMBENCH_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;  // module default: hardware concurrency
}

std::map<std::string, bool> read_labels_csv(const std::string& text) {
  std::map<std::string, bool> labels;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("case_id,", 0) == 0) continue;  // header
    }
    std::size_t comma = line.rfind(',');
    if (comma == std::string::npos) throw Error("bad labels CSV line: " + line);
    std::string value = line.substr(comma + 1);
    labels[line.substr(0, comma)] = value == "1" || value == "true";
  }
  if (labels.empty()) throw Error("labels CSV contains no rows");
  return labels;
}

std::string labels_to_csv(const std::map<std::string, bool>& labels) {
  std::string out = "case_id,label\n";
  for (const auto& [id, label] : labels) {
    bool quote = id.find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      out.push_back('"');
      for (char c : id) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      out.push_back('"');
    } else {
      out += id;
    }
    out += label ? ",1\n" : ",0\n";
  }
  return out;
}

void print_report_tables(const json& report) {
  std::printf("Accuracy\n");
  std::printf("  %-8s %-7s %-7s %-8s\n", "strategy", "auc", "f1", "accuracy");
  for (const auto& s : report.at("strategies")) {
    std::printf("  %-8s %-7.3f %-7.3f %-8.3f\n", s.at("strategy").get<std::string>().c_str(),
                s.at("auc").get<double>(), s.at("f1").get<double>(),
                s.at("accuracy").get<double>());
  }
  std::printf("\nGain vs M0 (computed as (Mi - M0) / M0)\n");
  const auto& gains = report.at("gains_vs_m0");
  std::printf("  %-8s %-6s\n", "model", "gain");
  std::printf("  %-8s %-6.2f\n", "M1", gains.at("S1").get<double>());
  std::printf("  %-8s %-6.2f\n", "M2", gains.at("S2").get<double>());
  std::printf("  %-8s %-6.2f\n", "M3", gains.at("S3").get<double>());
  std::printf("\nTime\n");
  std::printf("  %-8s %-10s %-10s %-10s %-10s %-10s\n", "strategy", "total", "m0_build", "retrain",
              "hyperopt", "update");
  for (const auto& s : report.at("strategies")) {
    const auto& t = s.at("time");
    std::printf("  %-8s %-10s %-10s %-10s %-10s %-10s\n",
                s.at("strategy").get<std::string>().c_str(),
                format_hms(t.at("total_s").get<double>()).c_str(),
                format_hms(t.at("m0_build_s").get<double>()).c_str(),
                format_hms(t.at("retrain_s").get<double>()).c_str(),
                format_hms(t.at("hyperopt_s").get<double>()).c_str(),
                format_hms(t.at("update_s").get<double>()).c_str());
  }
  if (report.contains("fastcase_threshold_seconds")) {
    std::printf("\nfast-case threshold: %.1f s (mean cycle time of TR0 u TR1, frozen)\n",
                report.at("fastcase_threshold_seconds").get<double>());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-update strategy benchmark for outcome-oriented predictive process monitoring"};
  app.require_subcommand(1);

  // generate
  auto* cmd_generate = app.add_subcommand("generate", "Generate the synthetic concept-drift log");
  std::string gen_config_path, gen_out;
  std::uint64_t gen_seed = 42;
  std::size_t gen_cases = 2000;
  double gen_drift_at = 0.70;
  cmd_generate->add_option("--config", gen_config_path, "Generator config JSON");
  cmd_generate->add_option("--out", gen_out, "Output XES path")->required();
  cmd_generate->add_option("--seed", gen_seed, "Generator seed");
  cmd_generate->add_option("--cases", gen_cases, "Number of cases");
  cmd_generate->add_option("--drift-at", gen_drift_at, "Fraction of cases before the drift");

  // stats
  auto* cmd_stats = app.add_subcommand("stats", "Print event-log statistics");
  std::string stats_log, stats_mapping;
  cmd_stats->add_option("--log", stats_log, "Event log (.xes or .csv)")->required();
  cmd_stats->add_option("--csv-mapping", stats_mapping, "CSV mapping JSON (for .csv logs)");

  // label
  auto* cmd_label = app.add_subcommand("label", "Compute outcome labels for complete cases");
  std::string label_log_path, label_mapping, label_formula, label_reference, label_out;
  bool label_fast_case = false;
  cmd_label->add_option("--log", label_log_path, "Event log")->required();
  cmd_label->add_option("--csv-mapping", label_mapping, "CSV mapping JSON");
  cmd_label->add_option("--formula", label_formula, "LTLf outcome formula");
  cmd_label->add_flag("--fast-case", label_fast_case, "Duration-based fast-case labeling");
  cmd_label->add_option("--reference-log", label_reference,
                        "Reference log for the fast-case threshold (default: the log itself)");
  cmd_label->add_option("--out", label_out, "Output labels CSV")->required();

  // encode
  auto* cmd_encode = app.add_subcommand("encode", "Encode prefixes into feature vectors");
  std::string enc_log, enc_mapping, enc_labels, enc_out;
  std::size_t enc_cap = 20;
  cmd_encode->add_option("--log", enc_log, "Event log")->required();
  cmd_encode->add_option("--csv-mapping", enc_mapping, "CSV mapping JSON");
  cmd_encode->add_option("--labels", enc_labels, "Labels CSV from `label`")->required();
  cmd_encode->add_option("--prefix-cap", enc_cap, "Maximum prefix length");
  cmd_encode->add_option("--out", enc_out, "Output dataset CSV")->required();

  // train
  auto* cmd_train = app.add_subcommand("train", "Train a model on an encoded dataset");
  std::string train_data, train_family = "batch", train_hp, train_out;
  std::uint64_t train_seed = 42;
  int train_threads = default_threads();
  cmd_train->add_option("--data", train_data, "Encoded dataset CSV")->required();
  cmd_train->add_option("--family", train_family, "batch|incremental")
      ->check(CLI::IsMember({"batch", "incremental"}));
  cmd_train->add_option("--hp", train_hp, "Hyperparameter JSON");
  cmd_train->add_option("--seed", train_seed, "Training seed");
  cmd_train->add_option("--threads", train_threads, "Tree-training parallelism");
  cmd_train->add_option("--out", train_out, "Output model path")->required();

  // experiment
  auto* cmd_exp = app.add_subcommand("experiment", "Run the S0-S3 strategy comparison");
  std::string exp_config, exp_out_dir;
  int exp_threads = default_threads();
  cmd_exp->add_option("--config", exp_config, "Experiment config JSON")->required();
  cmd_exp->add_option("--out-dir", exp_out_dir, "Report output directory")->required();
  cmd_exp->add_option("--threads", exp_threads, "Tree-training parallelism");

  // report
  auto* cmd_report = app.add_subcommand("report", "Render report tables from an experiment directory");
  std::string rep_in;
  cmd_report->add_option("--in", rep_in, "Experiment output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*cmd_generate) {
      GeneratorConfig cfg;
      if (!gen_config_path.empty()) cfg = generator_config_from_json(read_file(gen_config_path));
      if (cmd_generate->count("--seed")) cfg.seed = gen_seed;
      if (cmd_generate->count("--cases")) cfg.n_cases = gen_cases;
      if (cmd_generate->count("--drift-at")) cfg.drift_at_fraction = gen_drift_at;
      std::cout << "config: " << generator_config_echo(cfg).dump() << "\n";
      EventLog log = generate(cfg);
      write_file(gen_out, write_xes(log));
      LogStats st = stats(log);
      std::printf("wrote %s: cases=%zu events=%zu activities=%zu\n", gen_out.c_str(), st.n_cases,
                  st.n_events, st.n_activities);
    } else if (*cmd_stats) {
      EventLog log = load_log(stats_log, stats_mapping);
      LogStats st = stats(log);
      std::printf("cases=%zu events=%zu activities=%zu mean_cycle_time_s=%.3f\n", st.n_cases,
                  st.n_events, st.n_activities, st.mean_cycle_time_seconds);
      if (log.warnings() > 0)
        std::fprintf(stderr, "warning: %zu attribute(s) dropped during parsing\n", log.warnings());
    } else if (*cmd_label) {
      if (label_fast_case == !label_formula.empty())
        throw Error("label: exactly one of --formula or --fast-case is required");
      EventLog log = load_log(label_log_path, label_mapping);
      OutcomeLabeler labeler = [&]() {
        if (!label_formula.empty()) return OutcomeLabeler::ltl(parse_formula(label_formula));
        if (!label_reference.empty())
          return OutcomeLabeler::fast_case(load_log(label_reference, label_mapping));
        return OutcomeLabeler::fast_case(log);
      }();
      json echo = {{"log", label_log_path},
                   {"labeler", label_fast_case ? "fast_case" : label_formula}};
      if (labeler.is_fast_case()) echo["threshold_seconds"] = labeler.threshold_seconds();
      std::cout << "config: " << echo.dump() << "\n";
      write_file(label_out, labels_to_csv(label_log(log, labeler)));
      std::printf("wrote %s: %zu labels\n", label_out.c_str(), log.traces().size());
    } else if (*cmd_encode) {
      EventLog log = load_log(enc_log, enc_mapping);
      auto labels = read_labels_csv(read_file(enc_labels));
      json echo = {{"log", enc_log}, {"labels", enc_labels}, {"prefix_cap", enc_cap}};
      std::cout << "config: " << echo.dump() << "\n";
      auto schema = std::make_shared<const EncodingSchema>(EncodingSchema::fit(log.traces(), enc_cap));
      EncodedDataset ds = encode_set(log.traces(), schema, labels, enc_cap);
      write_file(enc_out, dataset_to_csv(ds));
      std::printf("wrote %s: %zu instances, width %zu\n", enc_out.c_str(), ds.instances.size(),
                  ds.width);
    } else if (*cmd_train) {
      EncodedDataset ds = dataset_from_csv(read_file(train_data));
      json hp_json = train_hp.empty() ? json::object() : json::parse(read_file(train_hp));
      json echo = {{"data", train_data},
                   {"family", train_family},
                   {"hp", hp_json},
                   {"seed", train_seed},
                   {"threads", train_threads}};
      std::cout << "config: " << echo.dump() << "\n";
      std::vector<std::uint8_t> bytes;
      if (train_family == "batch") {
        BatchHyperparameters hp;
        hp.n_trees = hp_json.value("n_trees", hp.n_trees);
        hp.max_depth = hp_json.value("max_depth", hp.max_depth);
        hp.min_samples_leaf = hp_json.value("min_samples_leaf", hp.min_samples_leaf);
        hp.max_features_fraction = hp_json.value("max_features_fraction", hp.max_features_fraction);
        Model model(BatchForest::train(ds, hp, train_seed, train_threads));
        bytes = model.serialize();
      } else {
        IncHyperparameters hp;
        hp.n_trees = hp_json.value("n_trees", hp.n_trees);
        hp.grace_period = hp_json.value("grace_period", hp.grace_period);
        hp.split_confidence = hp_json.value("split_confidence", hp.split_confidence);
        hp.tie_threshold = hp_json.value("tie_threshold", hp.tie_threshold);
        hp.max_features_fraction = hp_json.value("max_features_fraction", hp.max_features_fraction);
        Model model(IncrementalForest::train_initial(ds, hp, train_seed, train_threads));
        bytes = model.serialize();
      }
      write_file(train_out, std::string(bytes.begin(), bytes.end()));
      std::printf("wrote %s: %zu bytes\n", train_out.c_str(), bytes.size());
    } else if (*cmd_exp) {
      std::string config_text = read_file(exp_config);
      ExperimentConfig cfg = ExperimentConfig::from_json_text(config_text);
      if (cmd_exp->count("--threads") || cfg.threads == 0) cfg.threads = exp_threads;
      json raw = json::parse(config_text);
      if (cfg.log_path.empty() && !raw.contains("generate"))
        throw Error("experiment config must set \"log\" or a \"generate\" block");
      std::cout << "config: " << cfg.to_json_text() << "\n";
      EventLog log = [&]() {
        if (raw.contains("generate")) {
          GeneratorConfig gen = generator_config_from_json_obj(raw.at("generate"));
          std::cout << "generator: " << generator_config_echo(gen).dump() << "\n";
          return generate(gen);
        }
        return load_log(cfg.log_path, "");
      }();
      ExperimentReport report = run_all(log, cfg, exp_out_dir);
      print_report_tables(json::parse(report.to_json_text()));
      std::printf("\nwrote %s/report.json, report.csv, gains.csv\n", exp_out_dir.c_str());
    } else if (*cmd_report) {
      json report = json::parse(read_file(rep_in + "/report.json"));
      print_report_tables(report);
      std::string plot = "strategy,auc,total_s\n";
      for (const auto& s : report.at("strategies")) {
        char line[128];
        std::snprintf(line, sizeof(line), "%s,%.6f,%.6f\n",
                      s.at("strategy").get<std::string>().c_str(), s.at("auc").get<double>(),
                      s.at("time").at("total_s").get<double>());
        plot += line;
      }
      write_file(rep_in + "/plot.csv", plot);
      std::printf("\nwrote %s/plot.csv\n", rep_in.c_str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
