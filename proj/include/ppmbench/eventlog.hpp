#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ppmbench/value.hpp"

namespace ppmbench {

struct Event {
  std::string activity;
  Timestamp timestamp;
  AttrMap payload;

  bool operator==(const Event&) const = default;
};

struct Trace {
  std::string case_id;
  std::vector<Event> events;  // sorted by timestamp, stable
  AttrMap case_attributes;

  Timestamp start_time() const { return events.front().timestamp; }
  Timestamp end_time() const { return events.back().timestamp; }
  double cycle_time_seconds() const {
    return static_cast<double>(end_time().millis - start_time().millis) / 1000.0;
  }

  bool operator==(const Trace&) const = default;
};

struct AttributeSchema {
  std::map<std::string, ValueKind> case_attrs;
  std::map<std::string, ValueKind> event_attrs;
};

class EventLog {
 public:
  // Establishes the log invariants: re-sorts events stably by timestamp,
  // checks non-empty traces, unique case ids, consistent attribute kinds,
  // and derives the lexicographic alphabet. Throws Error on violation.
  static EventLog from_traces(std::vector<Trace> traces, std::size_t warnings = 0);

  const std::vector<Trace>& traces() const { return traces_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const AttributeSchema& schema() const { return schema_; }
  std::size_t warnings() const { return warnings_; }

  std::size_t n_events() const;

  bool operator==(const EventLog& other) const { return traces_ == other.traces_; }

 private:
  std::vector<Trace> traces_;
  std::vector<std::string> alphabet_;
  AttributeSchema schema_;
  std::size_t warnings_ = 0;
};

struct LogStats {
  std::size_t n_cases = 0;
  std::size_t n_events = 0;
  std::size_t n_activities = 0;
  double mean_cycle_time_seconds = 0.0;
};

LogStats stats(const EventLog& log);

// XES core subset: log > trace > event with string/date/int/float/boolean
// attributes; concept:name names the activity on events and the case id on
// traces; time:timestamp is the event timestamp. Trace order is preserved.
EventLog parse_xes(std::string_view bytes);
std::string write_xes(const EventLog& log);

struct CsvColumn {
  std::string name;
  bool case_level = false;  // role: case | event
  ValueKind kind = ValueKind::String;
};

struct CsvMapping {
  std::string case_id_col;
  std::string activity_col;
  std::string timestamp_col;
  std::string timestamp_format;  // see parse_timestamp_format
  std::vector<CsvColumn> columns;

  static CsvMapping from_json(std::string_view json_text);
};

// Header row required; rows grouped by case id, groups ordered by start time.
EventLog parse_csv(std::string_view bytes, const CsvMapping& mapping);

}  // namespace ppmbench
