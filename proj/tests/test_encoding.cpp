#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "ppmbench/driftgen.hpp"
#include "ppmbench/encoding.hpp"
#include "ppmbench/error.hpp"
#include "ppmbench/rng.hpp"

using namespace ppmbench;

namespace {

Trace trace_of(const std::string& id, const std::vector<std::string>& activities,
               std::int64_t step_ms = 1000) {
  Trace t;
  t.case_id = id;
  std::int64_t ts = 0;
  for (const auto& a : activities) {
    Event e;
    e.activity = a;
    e.timestamp = Timestamp{ts};
    ts += step_ms;
    t.events.push_back(std::move(e));
  }
  return t;
}

std::shared_ptr<const EncodingSchema> fit(const std::vector<Trace>& traces, std::size_t cap) {
  return std::make_shared<const EncodingSchema>(EncodingSchema::fit(traces, cap));
}

}  // namespace

TEST_CASE("activity vocabulary gets PAD and OTHER slots") {
  auto schema = EncodingSchema::fit({trace_of("t", {"A", "B"})}, 3);
  CHECK(schema.activity_vocab().categories == std::vector<std::string>{"A", "B"});
  CHECK(schema.activity_vocab().width() == 4);
  CHECK(schema.width() == 3 * 4);  // no case or event attributes
}

TEST_CASE("width formula on the generated 19-activity log") {
  GeneratorConfig cfg;
  cfg.n_cases = 60;
  cfg.drift_at_fraction = 0.5;  // both phases present, union alphabet = 19
  cfg.seed = 4;
  EventLog log = generate(cfg);
  REQUIRE(log.alphabet().size() == 19);
  auto schema = EncodingSchema::fit(log.traces(), 20);

  // independent recount from the layout definition
  std::size_t per_index = log.alphabet().size() + 2;
  for (const auto& f : schema.event_features())
    per_index += f.kind == ValueKind::String ? f.vocab.width() : 1;
  std::size_t expected = 20 * per_index;
  for (const auto& f : schema.case_features())
    expected += f.kind == ValueKind::String ? f.vocab.width() : 1;
  CHECK(schema.width() == expected);
  CHECK(schema.width() == 20 * 21);  // generator emits no payload attributes
}

TEST_CASE("extract_prefixes caps at the trace length") {
  Trace five = trace_of("five", {"a", "b", "c", "d", "e"});
  auto p5 = extract_prefixes(five, 3);
  REQUIRE(p5.size() == 3);
  CHECK(p5[0].length == 1);
  CHECK(p5[2].length == 3);

  Trace two = trace_of("two", {"a", "b"});
  CHECK(extract_prefixes(two, 3).size() == 2);
  CHECK(extract_prefixes(trace_of("one", {"a"}), 3).size() == 1);
}

TEST_CASE("activity one-hot blocks with PAD") {
  auto schema = fit({trace_of("t", {"A", "B"})}, 2);
  Trace t = trace_of("x", {"A"});
  EncodedInstance inst = encode_prefix({&t, 1}, *schema, true);
  // vocab order [A, B, PAD, OTHER]; index 1 is padded
  CHECK(inst.features == std::vector<double>{1, 0, 0, 0, 0, 0, 1, 0});
  CHECK(inst.prefix_len == 1);
  CHECK(inst.label == true);
}

TEST_CASE("unseen activity maps to OTHER") {
  auto schema = fit({trace_of("t", {"A", "B"})}, 1);
  Trace t = trace_of("x", {"C"});
  EncodedInstance inst = encode_prefix({&t, 1}, *schema, false);
  CHECK(inst.features == std::vector<double>{0, 0, 0, 1});
}

TEST_CASE("numeric event attribute passthrough and padding") {
  Trace fitted = trace_of("f", {"A", "A", "A"});
  for (auto& e : fitted.events) e.payload["cost"] = Value(1.0);
  auto schema = fit({fitted}, 3);
  REQUIRE(schema->event_features().size() == 1);
  REQUIRE(schema->width() == 3 * (3 + 1));  // [A,PAD,OTHER] one-hot + cost, 3 indices

  Trace t = trace_of("x", {"A", "A"});
  t.events[1].payload["cost"] = Value(7.0);
  EncodedInstance inst = encode_prefix({&t, 2}, *schema, false);
  // index 1: A one-hot + cost 0 (absent), index 2: A + 7.0, index 3: PAD + 0
  CHECK(inst.features == std::vector<double>{1, 0, 0, 0, 1, 0, 0, 7.0, 0, 1, 0, 0});
}

TEST_CASE("timestamps encode as seconds since trace start") {
  Trace fitted = trace_of("f", {"A"});
  fitted.events[0].payload["due"] = Value(Timestamp{0});
  auto schema = fit({fitted}, 1);
  Trace t = trace_of("x", {"A"});
  t.events[0].timestamp = Timestamp{5000};
  t.events[0].payload["due"] = Value(Timestamp{8000});
  EncodedInstance inst = encode_prefix({&t, 1}, *schema, false);
  CHECK(inst.features == std::vector<double>{1, 0, 0, 3.0});
}

TEST_CASE("case attributes come first: numeric passthrough and categorical OTHER") {
  Trace fitted = trace_of("f", {"A"});
  fitted.case_attributes["amount"] = Value(std::int64_t{10});
  fitted.case_attributes["channel"] = Value(std::string("web"));
  auto schema = fit({fitted}, 1);
  // layout: amount (1), channel one-hot [web,PAD,OTHER] (3), activity (3)
  REQUIRE(schema->width() == 1 + 3 + 3);

  Trace t = trace_of("x", {"A"});
  t.case_attributes["amount"] = Value(std::int64_t{42});
  t.case_attributes["channel"] = Value(std::string("branch"));  // unseen
  EncodedInstance inst = encode_prefix({&t, 1}, *schema, true);
  CHECK(inst.features == std::vector<double>{42.0, 0, 0, 1, 1, 0, 0});
}

TEST_CASE("booleans encode as 0/1") {
  Trace fitted = trace_of("f", {"A"});
  fitted.events[0].payload["ok"] = Value(true);
  auto schema = fit({fitted}, 1);
  Trace t = trace_of("x", {"A"});
  t.events[0].payload["ok"] = Value(true);
  CHECK(encode_prefix({&t, 1}, *schema, false).features == std::vector<double>{1, 0, 0, 1.0});
  t.events[0].payload["ok"] = Value(false);
  CHECK(encode_prefix({&t, 1}, *schema, false).features == std::vector<double>{1, 0, 0, 0.0});
}

TEST_CASE("encode_set concatenates prefixes in start-time then length order") {
  Trace late = trace_of("late", {"a", "b"});
  for (auto& e : late.events) e.timestamp.millis += 100000;
  Trace early = trace_of("early", {"a", "b", "a"});
  std::vector<Trace> traces = {late, early};
  auto schema = fit(traces, 5);
  std::map<std::string, bool> labels = {{"late", true}, {"early", false}};
  EncodedDataset ds = encode_set(traces, schema, labels, 5);
  REQUIRE(ds.instances.size() == 5);
  CHECK(ds.instances[0].case_id == "early");
  CHECK(ds.instances[0].prefix_len == 1);
  CHECK(ds.instances[2].prefix_len == 3);
  CHECK(ds.instances[3].case_id == "late");
  CHECK(ds.instances[3].label == true);
  CHECK(ds.instances[0].label == false);
}

TEST_CASE("encode_set is deterministic") {
  Rng rng(5);
  std::vector<Trace> traces;
  const char* acts[] = {"a", "b", "c"};
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> seq;
    for (std::size_t j = 0; j <= rng.uniform_int(6); ++j) seq.push_back(acts[rng.uniform_int(3)]);
    traces.push_back(trace_of("t" + std::to_string(i), seq));
  }
  std::map<std::string, bool> labels;
  for (const auto& t : traces) labels[t.case_id] = rng.uniform() < 0.5;
  auto schema = fit(traces, 4);
  EncodedDataset a = encode_set(traces, schema, labels, 4);
  EncodedDataset b = encode_set(traces, schema, labels, 4);
  REQUIRE(a.instances.size() == b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].features == b.instances[i].features);
    CHECK(a.instances[i].case_id == b.instances[i].case_id);
  }
}

TEST_CASE("instance count equals the sum of capped trace lengths") {
  GeneratorConfig cfg;
  cfg.n_cases = 40;
  cfg.seed = 11;
  EventLog log = generate(cfg);
  auto schema = fit(log.traces(), 20);
  std::map<std::string, bool> labels;
  for (const auto& t : log.traces()) labels[t.case_id] = true;
  labels.begin()->second = false;
  EncodedDataset ds = encode_set(log.traces(), schema, labels, 20);

  std::size_t expected = 0;
  for (const auto& t : log.traces()) expected += std::min<std::size_t>(t.events.size(), 20);
  CHECK(ds.instances.size() == expected);
}

TEST_CASE("missing label is an error") {
  std::vector<Trace> traces = {trace_of("a", {"x"}), trace_of("b", {"x"})};
  auto schema = fit(traces, 2);
  std::map<std::string, bool> labels = {{"a", true}};
  CHECK_THROWS_AS(encode_set(traces, schema, labels, 2), Error);
}

TEST_CASE("fit_schema rejects empty input and bad caps") {
  CHECK_THROWS_AS(EncodingSchema::fit({}, 3), Error);
  CHECK_THROWS_AS(EncodingSchema::fit({trace_of("t", {"a"})}, 0), Error);
}

TEST_CASE("properties: width invariance and one-hot validity") {
  Rng rng(41);
  const char* acts[] = {"a", "b", "c"};
  const char* cats[] = {"x", "y"};
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Trace> traces;
    std::size_t n = 2 + rng.uniform_int(8);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> seq;
      for (std::size_t j = 0; j <= rng.uniform_int(5); ++j) seq.push_back(acts[rng.uniform_int(3)]);
      Trace t = trace_of("t" + std::to_string(i), seq);
      for (auto& e : t.events) {
        if (rng.uniform() < 0.5) e.payload["cat"] = Value(std::string(cats[rng.uniform_int(2)]));
        if (rng.uniform() < 0.5) e.payload["num"] = Value(rng.uniform());
      }
      traces.push_back(std::move(t));
    }
    std::size_t cap = 1 + rng.uniform_int(6);
    auto schema = fit(traces, cap);
    std::map<std::string, bool> labels;
    for (const auto& t : traces) labels[t.case_id] = rng.uniform() < 0.5;
    EncodedDataset ds = encode_set(traces, schema, labels, cap);

    for (const auto& inst : ds.instances) {
      REQUIRE(inst.features.size() == schema->width());
      // walk the layout and check every categorical block
      std::size_t pos = 0;
      auto check_block = [&](std::size_t width) {
        double sum = 0.0;
        for (std::size_t k = 0; k < width; ++k) {
          double v = inst.features[pos + k];
          REQUIRE((v == 0.0 || v == 1.0));
          sum += v;
        }
        REQUIRE(sum == 1.0);
        pos += width;
      };
      for (const auto& f : schema->case_features()) {
        if (f.kind == ValueKind::String) check_block(f.vocab.width());
        else ++pos;
      }
      for (std::size_t i = 0; i < cap; ++i) {
        check_block(schema->activity_vocab().width());
        for (const auto& f : schema->event_features()) {
          if (f.kind == ValueKind::String) check_block(f.vocab.width());
          else ++pos;
        }
      }
      REQUIRE(pos == schema->width());
    }
  }
}

TEST_CASE("property: encoding is injective on in-vocabulary prefixes") {
  Rng rng(43);
  const char* acts[] = {"a", "b"};
  std::vector<Trace> fit_traces = {trace_of("f", {"a", "b"})};
  auto schema = fit(fit_traces, 4);
  std::set<std::vector<std::string>> seen_prefixes;
  std::set<std::vector<double>> seen_encodings;
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<std::string> seq;
    for (std::size_t j = 0; j <= rng.uniform_int(4); ++j) seq.push_back(acts[rng.uniform_int(2)]);
    Trace t = trace_of("t", seq, 0);  // constant timestamps: activities carry all information
    EncodedInstance inst = encode_prefix({&t, seq.size()}, *schema, false);
    bool new_prefix = seen_prefixes.insert(seq).second;
    bool new_encoding = seen_encodings.insert(inst.features).second;
    CHECK(new_prefix == new_encoding);
  }
}

TEST_CASE("dataset CSV round trip") {
  std::vector<Trace> traces = {trace_of("with,comma", {"a", "b"}), trace_of("plain", {"b"})};
  auto schema = fit(traces, 2);
  std::map<std::string, bool> labels = {{"with,comma", true}, {"plain", false}};
  EncodedDataset ds = encode_set(traces, schema, labels, 2);
  EncodedDataset round = dataset_from_csv(dataset_to_csv(ds));
  REQUIRE(round.instances.size() == ds.instances.size());
  CHECK(round.width == ds.width);
  for (std::size_t i = 0; i < ds.instances.size(); ++i) {
    CHECK(round.instances[i].features == ds.instances[i].features);
    CHECK(round.instances[i].label == ds.instances[i].label);
    CHECK(round.instances[i].case_id == ds.instances[i].case_id);
    CHECK(round.instances[i].prefix_len == ds.instances[i].prefix_len);
  }
}
