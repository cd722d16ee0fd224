#include "ppmbench/driftgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ppmbench/error.hpp"
#include "ppmbench/rng.hpp"

namespace ppmbench {

namespace {

void collect_activities(const ProcessNode& node, std::set<std::string>& out) {
  if (node.type == ProcessNode::Type::Activity) {
    out.insert(node.activity);
    return;
  }
  for (const auto& child : node.children) collect_activities(child, out);
}

}  // namespace

std::vector<std::string> ProcessModel::alphabet() const {
  std::set<std::string> acts;
  collect_activities(root, acts);
  return {acts.begin(), acts.end()};
}

void ProcessModel::validate() const {
  std::set<std::string> acts;
  collect_activities(root, acts);
  for (const auto& a : acts)
    if (!timings.count(a)) throw Error("process model: no duration for activity '" + a + "'");
  struct Walker {
    void operator()(const ProcessNode& n) const {
      if (n.type == ProcessNode::Type::Choice) {
        if (n.children.size() != n.branch_probabilities.size())
          throw Error("process model: choice branches and probabilities differ in size");
        double sum = 0.0;
        for (double p : n.branch_probabilities) {
          if (p < 0.0) throw Error("process model: negative branch probability");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
          throw Error("process model: branch probabilities must sum to 1");
      }
      if (n.type == ProcessNode::Type::Optional &&
          !(n.exec_probability >= 0.0 && n.exec_probability <= 1.0))
        throw Error("process model: optional probability out of range");
      for (const auto& c : n.children) (*this)(c);
    }
  };
  Walker{}(root);
  for (const auto& [name, t] : timings) {
    if (!(t.median_minutes > 0.0) || !(t.sigma_log > 0.0))
      throw Error("process model: non-positive duration parameters for '" + name + "'");
  }
  if (!(mean_interarrival_minutes > 0.0))
    throw Error("process model: non-positive inter-arrival mean");
}

ProcessModel base_model() {
  using PN = ProcessNode;
  ProcessModel m;
  m.root = PN::seq({
      PN::act("Submit application"),
      PN::act("Check completeness"),
      PN::choice({PN::seq({PN::act("Request missing info"), PN::act("Receive missing info")}),
                  PN::seq({})},
                 {0.3, 0.7}),
      PN::act("Register application"),
      PN::parallel({PN::act("Credit history check"), PN::act("Income verification")}),
      PN::act("Assess eligibility"),
      PN::choice({PN::seq({PN::act("Prepare offer"), PN::act("Send offer"),
                           PN::act("Receive signed offer")}),
                  PN::seq({PN::act("Reject application"), PN::act("Notify rejection")})},
                 {0.55, 0.45}),
      PN::act("Verify documents"),
      PN::act("Final approval"),
      PN::act("Archive case"),
      PN::act("Close case"),
      PN::act("Update records"),
  });
  m.timings = {
      {"Submit application", {10, 0.35}},
      {"Check completeness", {30, 0.35}},
      {"Request missing info", {20, 0.35}},
      {"Receive missing info", {360, 0.35}},
      {"Register application", {15, 0.35}},
      {"Credit history check", {120, 0.35}},
      {"Income verification", {180, 0.35}},
      {"Assess eligibility", {120, 0.35}},
      {"Prepare offer", {60, 0.35}},
      {"Send offer", {10, 0.35}},
      {"Receive signed offer", {720, 0.35}},
      {"Reject application", {30, 0.35}},
      {"Notify rejection", {10, 0.35}},
      {"Verify documents", {90, 0.35}},
      {"Final approval", {60, 0.35}},
      {"Archive case", {10, 0.35}},
      {"Close case", {5, 0.35}},
      {"Update records", {5, 0.35}},
  };
  m.mean_interarrival_minutes = 30.0;
  m.validate();
  return m;
}

DriftSpec DriftSpec::defaults() {
  DriftSpec spec;
  spec.resequentialize = {"Verify documents", "Final approval"};
  spec.insert_activity = "Compliance check";
  spec.insert_after = "Register application";
  spec.insert_timing = {60, 0.35};
  // optionalizing the longest activity makes the duration label hinge on a
  // control-flow-visible change, which is what the drifted phase is for
  spec.optionalize = "Receive signed offer";
  spec.optional_probability = 0.5;
  spec.slow_down = {"Assess eligibility", "Verify documents"};
  spec.duration_multiplier = 2.0;
  return spec;
}

namespace {

// R: the two activities must appear as adjacent children of one Sequence.
bool resequentialize(ProcessNode& node, const std::string& first, const std::string& second) {
  if (node.type == ProcessNode::Type::Sequence) {
    for (std::size_t i = 0; i + 1 < node.children.size(); ++i) {
      if (node.children[i].type == ProcessNode::Type::Activity &&
          node.children[i].activity == first &&
          node.children[i + 1].type == ProcessNode::Type::Activity &&
          node.children[i + 1].activity == second) {
        ProcessNode par = ProcessNode::parallel({node.children[i], node.children[i + 1]});
        node.children[i] = std::move(par);
        node.children.erase(node.children.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        return true;
      }
    }
  }
  for (auto& child : node.children)
    if (resequentialize(child, first, second)) return true;
  return false;
}

bool insert_after(ProcessNode& node, const std::string& anchor, const std::string& activity) {
  if (node.type == ProcessNode::Type::Sequence) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (node.children[i].type == ProcessNode::Type::Activity &&
          node.children[i].activity == anchor) {
        node.children.insert(node.children.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                             ProcessNode::act(activity));
        return true;
      }
    }
  }
  for (auto& child : node.children)
    if (insert_after(child, anchor, activity)) return true;
  return false;
}

bool optionalize(ProcessNode& node, const std::string& activity, double probability) {
  for (auto& child : node.children) {
    if (child.type == ProcessNode::Type::Activity && child.activity == activity) {
      child = ProcessNode::optional(std::move(child), probability);
      return true;
    }
    if (optionalize(child, activity, probability)) return true;
  }
  return false;
}

}  // namespace

ProcessModel apply_drift(const ProcessModel& model, const DriftSpec& spec) {
  ProcessModel drifted = model;

  if (!spec.resequentialize.first.empty()) {
    if (!resequentialize(drifted.root, spec.resequentialize.first, spec.resequentialize.second))
      throw Error("apply_drift: sequential pair (" + spec.resequentialize.first + ", " +
                  spec.resequentialize.second + ") not found");
  }
  if (!spec.insert_activity.empty()) {
    if (drifted.timings.count(spec.insert_activity))
      throw Error("apply_drift: inserted activity '" + spec.insert_activity + "' already exists");
    if (!insert_after(drifted.root, spec.insert_after, spec.insert_activity))
      throw Error("apply_drift: insertion point '" + spec.insert_after + "' not found");
    drifted.timings[spec.insert_activity] = spec.insert_timing;
  }
  if (!spec.optionalize.empty()) {
    if (!optionalize(drifted.root, spec.optionalize, spec.optional_probability))
      throw Error("apply_drift: activity '" + spec.optionalize + "' not found");
  }
  for (const std::string& name : {spec.slow_down.first, spec.slow_down.second}) {
    if (name.empty()) continue;
    auto it = drifted.timings.find(name);
    if (it == drifted.timings.end())
      throw Error("apply_drift: slow-down activity '" + name + "' not found");
    if (!(spec.duration_multiplier > 1.0))
      throw Error("apply_drift: duration multiplier must be > 1");
    it->second.median_minutes *= spec.duration_multiplier;
  }
  drifted.validate();
  return drifted;
}

namespace {

// Simulates one block; events carry activity completion times (seconds).
// case_speed scales every duration in the case.
double simulate(const ProcessNode& node, const ProcessModel& model, double t_start,
                double case_speed, Rng& rng,
                std::vector<std::pair<double, std::string>>& events) {
  switch (node.type) {
    case ProcessNode::Type::Activity: {
      const ActivityTiming& timing = model.timings.at(node.activity);
      double duration =
          case_speed * rng.log_normal_median(timing.median_minutes * 60.0, timing.sigma_log);
      double t_end = t_start + duration;
      events.emplace_back(t_end, node.activity);
      return t_end;
    }
    case ProcessNode::Type::Sequence: {
      double t = t_start;
      for (const auto& child : node.children)
        t = simulate(child, model, t, case_speed, rng, events);
      return t;
    }
    case ProcessNode::Type::Choice: {
      double u = rng.uniform();
      double acc = 0.0;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        acc += node.branch_probabilities[i];
        if (u < acc || i + 1 == node.children.size())
          return simulate(node.children[i], model, t_start, case_speed, rng, events);
      }
      return t_start;
    }
    case ProcessNode::Type::Parallel: {
      double t_end = t_start;
      for (const auto& child : node.children)
        t_end = std::max(t_end, simulate(child, model, t_start, case_speed, rng, events));
      return t_end;
    }
    case ProcessNode::Type::Optional:
      if (rng.uniform() < node.exec_probability)
        return simulate(node.children[0], model, t_start, case_speed, rng, events);
      return t_start;
  }
  return t_start;
}

}  // namespace

EventLog generate(const GeneratorConfig& config) {
  if (!(config.drift_at_fraction > 0.0 && config.drift_at_fraction < 1.0))
    throw Error("generate: drift_at_fraction must be in (0,1)");
  ProcessModel base = base_model();
  base.mean_interarrival_minutes = config.mean_interarrival_minutes;
  ProcessModel drifted = apply_drift(base, config.drift);

  Rng rng(config.seed);
  std::size_t n_base = static_cast<std::size_t>(
      std::floor(config.drift_at_fraction * static_cast<double>(config.n_cases)));

  int id_width = 1;
  for (std::size_t v = config.n_cases; v >= 10; v /= 10) ++id_width;

  std::vector<Trace> traces;
  traces.reserve(config.n_cases);
  double arrival_seconds = 0.0;
  for (std::size_t i = 0; i < config.n_cases; ++i) {
    arrival_seconds += rng.exponential(1.0 / (config.mean_interarrival_minutes * 60.0));
    const ProcessModel& model = i < n_base ? base : drifted;
    double case_speed = std::exp(config.case_speed_sigma_log * rng.normal());
    std::vector<std::pair<double, std::string>> raw;
    simulate(model.root, model, arrival_seconds, case_speed, rng, raw);
    // the first recorded activity marks the case arrival itself, so case start
    // order is exactly arrival order (the drift boundary relies on this)
    raw.front().first = arrival_seconds;

    Trace trace;
    std::string number = std::to_string(i + 1);
    trace.case_id = "case_" + std::string(static_cast<std::size_t>(id_width) - number.size(), '0') + number;
    trace.events.reserve(raw.size());
    for (const auto& [t, activity] : raw) {
      Event ev;
      ev.activity = activity;
      ev.timestamp =
          Timestamp{config.start_epoch_millis + static_cast<std::int64_t>(std::llround(t * 1000.0))};
      trace.events.push_back(std::move(ev));
    }
    traces.push_back(std::move(trace));
  }
  return EventLog::from_traces(std::move(traces));
}

}  // namespace ppmbench
