#include "ppmbench/eventlog.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ppmbench/error.hpp"
#include "xml.hpp"

namespace ppmbench {

const char* value_kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::String: return "string";
    case ValueKind::Integer: return "integer";
    case ValueKind::Real: return "real";
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Timestamp: return "timestamp";
  }
  return "?";
}

ValueKind value_kind_from_name(const std::string& name) {
  if (name == "string") return ValueKind::String;
  if (name == "integer" || name == "int") return ValueKind::Integer;
  if (name == "real" || name == "float") return ValueKind::Real;
  if (name == "boolean" || name == "bool") return ValueKind::Boolean;
  if (name == "timestamp" || name == "date") return ValueKind::Timestamp;
  throw Error("unknown value kind '" + name + "'");
}

namespace {

void merge_schema(std::map<std::string, ValueKind>& schema, const AttrMap& attrs,
                  const char* level, const std::string& case_id) {
  for (const auto& [name, value] : attrs) {
    auto [it, inserted] = schema.emplace(name, value.kind());
    if (!inserted && it->second != value.kind())
      throw Error("mixed value kinds for " + std::string(level) + " attribute '" + name +
                  "' (case '" + case_id + "'): " + value_kind_name(it->second) + " vs " +
                  value_kind_name(value.kind()));
  }
}

}  // namespace

EventLog EventLog::from_traces(std::vector<Trace> traces, std::size_t warnings) {
  EventLog log;
  log.warnings_ = warnings;
  std::set<std::string> seen_ids;
  std::set<std::string> activities;
  for (auto& trace : traces) {
    if (trace.events.empty()) throw Error("trace '" + trace.case_id + "' has no events");
    if (!seen_ids.insert(trace.case_id).second)
      throw Error("duplicate case id '" + trace.case_id + "'");
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    merge_schema(log.schema_.case_attrs, trace.case_attributes, "case", trace.case_id);
    for (const auto& event : trace.events) {
      if (event.activity.empty())
        throw Error("event with empty activity in case '" + trace.case_id + "'");
      activities.insert(event.activity);
      merge_schema(log.schema_.event_attrs, event.payload, "event", trace.case_id);
    }
  }
  log.alphabet_.assign(activities.begin(), activities.end());
  log.traces_ = std::move(traces);
  return log;
}

std::size_t EventLog::n_events() const {
  std::size_t n = 0;
  for (const auto& t : traces_) n += t.events.size();
  return n;
}

LogStats stats(const EventLog& log) {
  LogStats s;
  s.n_cases = log.traces().size();
  s.n_events = log.n_events();
  s.n_activities = log.alphabet().size();
  double sum = 0.0;
  for (const auto& t : log.traces()) sum += t.cycle_time_seconds();
  s.mean_cycle_time_seconds = s.n_cases > 0 ? sum / static_cast<double>(s.n_cases) : 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// XES
// ---------------------------------------------------------------------------

namespace {

// Returns false when the element is not a scalar attribute we understand.
bool parse_xes_attribute(const xml::Tag& tag, std::string& key, Value& value) {
  const std::string* k = tag.attr("key");
  const std::string* v = tag.attr("value");
  if (!k || !v) return false;
  key = *k;
  if (tag.name == "string" || tag.name == "id") {
    value = Value(*v);
  } else if (tag.name == "date") {
    value = Value(parse_iso8601(*v));
  } else if (tag.name == "int") {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), i);
    if (ec != std::errc() || p != v->data() + v->size()) return false;
    value = Value(i);
  } else if (tag.name == "float") {
    try {
      std::size_t used = 0;
      double d = std::stod(*v, &used);
      if (used != v->size()) return false;
      value = Value(d);
    } catch (const std::exception&) {
      return false;
    }
  } else if (tag.name == "boolean") {
    if (*v == "true") value = Value(true);
    else if (*v == "false") value = Value(false);
    else return false;
  } else {
    return false;
  }
  return true;
}

}  // namespace

EventLog parse_xes(std::string_view bytes) {
  xml::Reader reader(bytes);
  std::vector<Trace> traces;
  std::size_t warnings = 0;

  if (reader.next() != xml::TokenType::StartElement || reader.tag().name != "log")
    throw ParseError("expected <log> root element", reader.position());

  enum class Where { Log, Trace, Event };
  Where where = Where::Log;
  Trace trace;
  Event event;
  bool event_has_timestamp = false;

  while (true) {
    xml::TokenType t = reader.next();
    if (t == xml::TokenType::Eof) {
      if (where != Where::Log) throw ParseError("unexpected end of input", reader.position());
      break;
    }
    if (t == xml::TokenType::StartElement) {
      const xml::Tag& tag = reader.tag();
      if (tag.name == "trace" && where == Where::Log) {
        where = Where::Trace;
        trace = Trace{};
        if (tag.self_closing) throw ParseError("empty <trace/>", reader.position());
        continue;
      }
      if (tag.name == "event" && where == Where::Trace) {
        where = Where::Event;
        event = Event{};
        event_has_timestamp = false;
        if (tag.self_closing)
          throw ParseError("event missing concept:name and time:timestamp", reader.position());
        continue;
      }
      if (where == Where::Log) {  // extension/global/classifier/log-level attrs
        if (!tag.self_closing) reader.skip_element(tag.name);
        continue;
      }
      std::string key;
      Value value;
      if (parse_xes_attribute(tag, key, value)) {
        if (where == Where::Event) {
          if (key == "concept:name") {
            if (value.kind() != ValueKind::String)
              throw ParseError("event concept:name must be a string", reader.position());
            event.activity = value.as_string();
          } else if (key == "time:timestamp") {
            if (value.kind() != ValueKind::Timestamp)
              throw ParseError("event time:timestamp must be a date", reader.position());
            event.timestamp = value.as_timestamp();
            event_has_timestamp = true;
          } else {
            event.payload[key] = value;
          }
        } else {
          if (key == "concept:name") {
            if (value.kind() != ValueKind::String)
              throw ParseError("trace concept:name must be a string", reader.position());
            trace.case_id = value.as_string();
          } else {
            trace.case_attributes[key] = value;
          }
        }
      } else {
        ++warnings;  // unparseable or non-scalar optional attribute: dropped
      }
      if (!tag.self_closing) reader.skip_element(tag.name);
      continue;
    }
    // EndElement
    const std::string& name = reader.end_name();
    if (name == "event" && where == Where::Event) {
      if (event.activity.empty())
        throw ParseError("event missing mandatory concept:name", reader.position());
      if (!event_has_timestamp)
        throw ParseError("event missing mandatory time:timestamp", reader.position());
      trace.events.push_back(std::move(event));
      where = Where::Trace;
    } else if (name == "trace" && where == Where::Trace) {
      if (trace.case_id.empty())
        throw ParseError("trace missing mandatory concept:name", reader.position());
      if (trace.events.empty())
        throw ParseError("trace '" + trace.case_id + "' has no events", reader.position());
      traces.push_back(std::move(trace));
      where = Where::Log;
    } else if (name == "log" && where == Where::Log) {
      break;
    }
    // other end tags already consumed by skip_element
  }

  return EventLog::from_traces(std::move(traces), warnings);
}

namespace {

void xml_escape(std::string& out, const std::string& s) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
}

std::string real_to_string(double d) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  (void)ec;
  return std::string(buf, p);
}

void write_attr(std::string& out, const std::string& indent, const std::string& key,
                const Value& value) {
  out += indent;
  switch (value.kind()) {
    case ValueKind::String:
      out += "<string key=\"";
      xml_escape(out, key);
      out += "\" value=\"";
      xml_escape(out, value.as_string());
      out += "\"/>\n";
      break;
    case ValueKind::Integer:
      out += "<int key=\"";
      xml_escape(out, key);
      out += "\" value=\"" + std::to_string(value.as_integer()) + "\"/>\n";
      break;
    case ValueKind::Real:
      out += "<float key=\"";
      xml_escape(out, key);
      out += "\" value=\"" + real_to_string(value.as_real()) + "\"/>\n";
      break;
    case ValueKind::Boolean:
      out += "<boolean key=\"";
      xml_escape(out, key);
      out += std::string("\" value=\"") + (value.as_boolean() ? "true" : "false") + "\"/>\n";
      break;
    case ValueKind::Timestamp:
      out += "<date key=\"";
      xml_escape(out, key);
      out += "\" value=\"" + format_iso8601(value.as_timestamp()) + "\"/>\n";
      break;
  }
}

}  // namespace

std::string write_xes(const EventLog& log) {
  std::string out;
  out.reserve(256 + log.n_events() * 128);
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<log xes.version=\"1.0\" xes.features=\"\">\n";
  out += "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
  out += "  <extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n";
  for (const auto& trace : log.traces()) {
    out += "  <trace>\n";
    write_attr(out, "    ", "concept:name", Value(trace.case_id));
    for (const auto& [key, value] : trace.case_attributes) write_attr(out, "    ", key, value);
    for (const auto& event : trace.events) {
      out += "    <event>\n";
      write_attr(out, "      ", "concept:name", Value(event.activity));
      write_attr(out, "      ", "time:timestamp", Value(event.timestamp));
      for (const auto& [key, value] : event.payload) write_attr(out, "      ", key, value);
      out += "    </event>\n";
    }
    out += "  </trace>\n";
  }
  out += "</log>\n";
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

CsvMapping CsvMapping::from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid CSV mapping JSON: ") + e.what());
  }
  CsvMapping m;
  try {
    m.case_id_col = j.at("case_id_col").get<std::string>();
    m.activity_col = j.at("activity_col").get<std::string>();
    m.timestamp_col = j.at("timestamp_col").get<std::string>();
    m.timestamp_format = j.at("timestamp_format").get<std::string>();
    if (j.contains("columns")) {
      for (const auto& c : j.at("columns")) {
        CsvColumn col;
        col.name = c.at("name").get<std::string>();
        std::string role = c.at("role").get<std::string>();
        if (role == "case") col.case_level = true;
        else if (role == "event") col.case_level = false;
        else throw Error("CSV mapping column role must be 'case' or 'event', got '" + role + "'");
        col.kind = value_kind_from_name(c.at("kind").get<std::string>());
        m.columns.push_back(std::move(col));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid CSV mapping JSON: ") + e.what());
  }
  return m;
}

namespace {

std::vector<std::string> split_csv_record(std::string_view text, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  while (pos < text.size()) {
    char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
      any = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      ++pos;
      fields.push_back(std::move(field));
      return fields;
    } else if (c == '\r') {
      // swallow, handled by following '\n'
    } else {
      field.push_back(c);
      any = true;
    }
    ++pos;
  }
  if (any || !field.empty()) fields.push_back(std::move(field));
  return fields;
}

Value parse_cell(const std::string& cell, ValueKind kind, const std::string& format,
                 std::size_t row_number) {
  try {
    switch (kind) {
      case ValueKind::String:
        return Value(cell);
      case ValueKind::Integer: {
        std::int64_t i = 0;
        auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), i);
        if (ec != std::errc() || p != cell.data() + cell.size()) throw Error("not an integer");
        return Value(i);
      }
      case ValueKind::Real: {
        std::size_t used = 0;
        double d = std::stod(cell, &used);
        if (used != cell.size()) throw Error("not a real");
        return Value(d);
      }
      case ValueKind::Boolean:
        if (cell == "true" || cell == "1") return Value(true);
        if (cell == "false" || cell == "0") return Value(false);
        throw Error("not a boolean");
      case ValueKind::Timestamp:
        return Value(parse_timestamp_format(cell, format));
    }
  } catch (const std::exception&) {
    throw Error("row " + std::to_string(row_number) + ": cell '" + cell + "' is not a valid " +
                value_kind_name(kind));
  }
  throw Error("unreachable");
}

}  // namespace

EventLog parse_csv(std::string_view bytes, const CsvMapping& mapping) {
  std::size_t pos = 0;
  std::vector<std::string> header = split_csv_record(bytes, pos);
  if (header.empty()) throw Error("empty CSV file");

  auto column_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error("CSV is missing mapped column '" + name + "'");
  };

  std::size_t case_idx = column_index(mapping.case_id_col);
  std::size_t act_idx = column_index(mapping.activity_col);
  std::size_t ts_idx = column_index(mapping.timestamp_col);
  struct Bound {
    std::size_t index;
    const CsvColumn* column;
  };
  std::vector<Bound> bound;
  for (const auto& col : mapping.columns) bound.push_back({column_index(col.name), &col});

  std::map<std::string, Trace> by_case;
  std::vector<std::string> case_order;
  std::size_t row_number = 1;  // header was row 1
  bool any_row = false;
  while (pos < bytes.size()) {
    std::vector<std::string> fields = split_csv_record(bytes, pos);
    ++row_number;
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    any_row = true;
    auto cell = [&](std::size_t idx) -> const std::string& {
      static const std::string empty;
      if (idx >= fields.size()) return empty;
      return fields[idx];
    };
    const std::string& case_id = cell(case_idx);
    if (case_id.empty()) throw Error("row " + std::to_string(row_number) + ": empty case id");
    const std::string& activity = cell(act_idx);
    if (activity.empty()) throw Error("row " + std::to_string(row_number) + ": empty activity");
    Value ts = parse_cell(cell(ts_idx), ValueKind::Timestamp, mapping.timestamp_format, row_number);

    auto [it, inserted] = by_case.try_emplace(case_id);
    if (inserted) {
      it->second.case_id = case_id;
      case_order.push_back(case_id);
    }
    Trace& trace = it->second;
    Event event;
    event.activity = activity;
    event.timestamp = ts.as_timestamp();
    for (const auto& b : bound) {
      const std::string& raw = cell(b.index);
      if (raw.empty()) continue;
      Value v = parse_cell(raw, b.column->kind, mapping.timestamp_format, row_number);
      if (b.column->case_level) {
        trace.case_attributes.emplace(b.column->name, std::move(v));  // first row wins
      } else {
        event.payload[b.column->name] = std::move(v);
      }
    }
    trace.events.push_back(std::move(event));
  }
  if (!any_row) throw Error("empty CSV file");

  std::vector<Trace> traces;
  traces.reserve(case_order.size());
  for (const auto& id : case_order) traces.push_back(std::move(by_case.at(id)));
  for (auto& t : traces)
    std::stable_sort(t.events.begin(), t.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
  std::stable_sort(traces.begin(), traces.end(),
                   [](const Trace& a, const Trace& b) { return a.start_time() < b.start_time(); });
  return EventLog::from_traces(std::move(traces));
}

}  // namespace ppmbench
