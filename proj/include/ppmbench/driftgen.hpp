#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ppmbench/eventlog.hpp"

namespace ppmbench {

// Block-structured control flow over activity nodes.
struct ProcessNode {
  enum class Type { Activity, Sequence, Choice, Parallel, Optional };
  Type type = Type::Sequence;
  std::string activity;                       // Activity
  std::vector<ProcessNode> children;          // Sequence/Choice/Parallel/Optional
  std::vector<double> branch_probabilities;   // Choice, must sum to 1
  double exec_probability = 1.0;              // Optional

  static ProcessNode act(std::string name) {
    ProcessNode n;
    n.type = Type::Activity;
    n.activity = std::move(name);
    return n;
  }
  static ProcessNode seq(std::vector<ProcessNode> children) {
    ProcessNode n;
    n.type = Type::Sequence;
    n.children = std::move(children);
    return n;
  }
  static ProcessNode choice(std::vector<ProcessNode> children, std::vector<double> probabilities) {
    ProcessNode n;
    n.type = Type::Choice;
    n.children = std::move(children);
    n.branch_probabilities = std::move(probabilities);
    return n;
  }
  static ProcessNode parallel(std::vector<ProcessNode> children) {
    ProcessNode n;
    n.type = Type::Parallel;
    n.children = std::move(children);
    return n;
  }
  static ProcessNode optional(ProcessNode child, double probability) {
    ProcessNode n;
    n.type = Type::Optional;
    n.children.push_back(std::move(child));
    n.exec_probability = probability;
    return n;
  }
};

// Log-normal activity duration: ln X ~ N(ln median_minutes * 60s, sigma_log^2)
struct ActivityTiming {
  double median_minutes = 10.0;
  double sigma_log = 0.75;

  bool operator==(const ActivityTiming&) const = default;
};

struct ProcessModel {
  ProcessNode root;
  std::map<std::string, ActivityTiming> timings;
  double mean_interarrival_minutes = 30.0;  // exponential arrivals

  std::vector<std::string> alphabet() const;  // lexicographic
  void validate() const;                      // probabilities, timing coverage
};

// Fixed 18-activity loan-assessment process.
ProcessModel base_model();

// Single composed drift: re-sequentialisation (R), insertion (I),
// optionalisation (O), plus a duration increase on two activities.
struct DriftSpec {
  std::pair<std::string, std::string> resequentialize;  // adjacent Sequence pair -> Parallel
  std::string insert_activity;
  std::string insert_after;  // mandatory step inserted right after this activity
  ActivityTiming insert_timing;
  std::string optionalize;
  double optional_probability = 0.5;
  std::pair<std::string, std::string> slow_down;
  double duration_multiplier = 2.0;

  static DriftSpec defaults();
};

ProcessModel apply_drift(const ProcessModel& model, const DriftSpec& spec);

struct GeneratorConfig {
  std::size_t n_cases = 2000;
  // First floor(fraction*n) cases run the base model. The default puts the
  // drift at the start of the last 30% of an 80% train region (0.8 * 0.7).
  double drift_at_fraction = 0.56;
  std::uint64_t seed = 42;
  DriftSpec drift = DriftSpec::defaults();
  double mean_interarrival_minutes = 30.0;
  // Per-case log-normal speed factor multiplying every duration in the case;
  // models workload/complexity autocorrelation within a case.
  double case_speed_sigma_log = 0.15;
  std::int64_t start_epoch_millis = 1672646400000;  // 2023-01-02T08:00:00Z
};

// Cases arrive by the inter-arrival process; drifted cases are the tail by
// start time. Deterministic per seed.
EventLog generate(const GeneratorConfig& config);

}  // namespace ppmbench
