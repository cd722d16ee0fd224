#include "ppmbench/encoding.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>

#include "ppmbench/error.hpp"

namespace ppmbench {

std::size_t CategoricalVocab::index_of(const std::string& value) const {
  auto it = std::lower_bound(categories.begin(), categories.end(), value);
  if (it != categories.end() && *it == value)
    return static_cast<std::size_t>(it - categories.begin());
  return other_index();
}

EncodingSchema EncodingSchema::fit(const std::vector<Trace>& traces, std::size_t max_prefix_len) {
  if (traces.empty()) throw Error("cannot fit an encoding schema on an empty trace set");
  if (max_prefix_len < 1) throw Error("max_prefix_len must be >= 1");

  EncodingSchema schema;
  schema.max_prefix_len_ = max_prefix_len;

  std::map<std::string, ValueKind> case_kinds;
  std::map<std::string, ValueKind> event_kinds;
  std::map<std::string, std::set<std::string>> case_cats;
  std::map<std::string, std::set<std::string>> event_cats;
  std::set<std::string> activities;

  auto record = [](std::map<std::string, ValueKind>& kinds,
                   std::map<std::string, std::set<std::string>>& cats, const AttrMap& attrs) {
    for (const auto& [name, value] : attrs) {
      auto [it, inserted] = kinds.emplace(name, value.kind());
      if (!inserted && it->second != value.kind())
        throw Error("mixed value kinds for attribute '" + name + "' while fitting schema");
      if (value.kind() == ValueKind::String) cats[name].insert(value.as_string());
    }
  };

  for (const auto& trace : traces) {
    record(case_kinds, case_cats, trace.case_attributes);
    for (const auto& event : trace.events) {
      activities.insert(event.activity);
      record(event_kinds, event_cats, event.payload);
    }
  }

  auto build = [](const std::map<std::string, ValueKind>& kinds,
                  std::map<std::string, std::set<std::string>>& cats) {
    std::vector<FeatureSpec> specs;
    for (const auto& [name, kind] : kinds) {  // std::map: lexicographic feature order
      FeatureSpec spec;
      spec.name = name;
      spec.kind = kind;
      if (kind == ValueKind::String) {
        auto& observed = cats[name];
        spec.vocab.categories.assign(observed.begin(), observed.end());
      }
      specs.push_back(std::move(spec));
    }
    return specs;
  };

  schema.case_features_ = build(case_kinds, case_cats);
  schema.event_features_ = build(event_kinds, event_cats);
  schema.activity_vocab_.categories.assign(activities.begin(), activities.end());

  std::size_t per_index = schema.activity_vocab_.width();
  for (const auto& f : schema.event_features_) per_index += f.width();
  schema.width_ = max_prefix_len * per_index;
  for (const auto& f : schema.case_features_) schema.width_ += f.width();
  return schema;
}

namespace {

void append_categorical_names(std::vector<std::string>& names, const std::string& base,
                              const CategoricalVocab& vocab) {
  for (const auto& cat : vocab.categories) names.push_back(base + "=" + cat);
  names.push_back(base + "=__PAD__");
  names.push_back(base + "=__OTHER__");
}

}  // namespace

std::vector<std::string> EncodingSchema::column_names() const {
  std::vector<std::string> names;
  names.reserve(width_);
  for (const auto& f : case_features_) {
    if (f.kind == ValueKind::String) append_categorical_names(names, "case." + f.name, f.vocab);
    else names.push_back("case." + f.name);
  }
  for (std::size_t i = 1; i <= max_prefix_len_; ++i) {
    append_categorical_names(names, "act." + std::to_string(i), activity_vocab_);
    for (const auto& f : event_features_) {
      std::string base = "ev." + std::to_string(i) + "." + f.name;
      if (f.kind == ValueKind::String) append_categorical_names(names, base, f.vocab);
      else names.push_back(std::move(base));
    }
  }
  return names;
}

std::string EncodingSchema::fingerprint() const {
  // FNV-1a over the layout description
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  mix(std::to_string(max_prefix_len_));
  for (const auto& name : column_names()) mix(name);
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Prefix> extract_prefixes(const Trace& trace, std::size_t max_prefix_len) {
  std::size_t upto = std::min(trace.events.size(), max_prefix_len);
  std::vector<Prefix> prefixes;
  prefixes.reserve(upto);
  for (std::size_t len = 1; len <= upto; ++len) prefixes.push_back(Prefix{&trace, len});
  return prefixes;
}

namespace {

void encode_categorical(std::vector<double>& out, const CategoricalVocab& vocab,
                        std::size_t hot_index) {
  std::size_t base = out.size();
  out.resize(base + vocab.width(), 0.0);
  out[base + hot_index] = 1.0;
}

void encode_attr(std::vector<double>& out, const FeatureSpec& spec, const AttrMap& attrs,
                 Timestamp trace_start, bool padded) {
  auto it = attrs.find(spec.name);
  if (spec.kind == ValueKind::String) {
    std::size_t hot;
    if (padded) hot = spec.vocab.pad_index();
    else if (it == attrs.end() || it->second.kind() != ValueKind::String) hot = spec.vocab.other_index();
    else hot = spec.vocab.index_of(it->second.as_string());
    encode_categorical(out, spec.vocab, hot);
    return;
  }
  double v = 0.0;
  if (!padded && it != attrs.end() && it->second.kind() == spec.kind)
    v = it->second.numeric(trace_start);
  out.push_back(v);
}

}  // namespace

EncodedInstance encode_prefix(const Prefix& prefix, const EncodingSchema& schema, bool label) {
  const Trace& trace = *prefix.trace;
  if (prefix.length < 1 || prefix.length > schema.max_prefix_len())
    throw Error("prefix length out of range");

  EncodedInstance inst;
  inst.label = label;
  inst.case_id = trace.case_id;
  inst.prefix_len = prefix.length;
  inst.features.reserve(schema.width());

  Timestamp start = trace.start_time();
  static const AttrMap kEmpty;

  for (const auto& spec : schema.case_features())
    encode_attr(inst.features, spec, trace.case_attributes, start, /*padded=*/false);

  for (std::size_t i = 1; i <= schema.max_prefix_len(); ++i) {
    bool padded = i > prefix.length;
    if (padded) {
      encode_categorical(inst.features, schema.activity_vocab(),
                         schema.activity_vocab().pad_index());
    } else {
      encode_categorical(inst.features, schema.activity_vocab(),
                         schema.activity_vocab().index_of(trace.events[i - 1].activity));
    }
    const AttrMap& payload = padded ? kEmpty : trace.events[i - 1].payload;
    for (const auto& spec : schema.event_features())
      encode_attr(inst.features, spec, payload, start, padded);
  }

  if (inst.features.size() != schema.width())
    throw Error("internal: encoded width " + std::to_string(inst.features.size()) +
                " != schema width " + std::to_string(schema.width()));
  return inst;
}

EncodedDataset encode_set(const std::vector<Trace>& traces,
                          std::shared_ptr<const EncodingSchema> schema,
                          const std::map<std::string, bool>& labels, std::size_t max_prefix_len) {
  if (!schema) throw Error("encode_set: schema is null");
  if (max_prefix_len != schema->max_prefix_len())
    throw Error("encode_set: max_prefix_len does not match the fitted schema");

  std::vector<const Trace*> ordered;
  ordered.reserve(traces.size());
  for (const auto& t : traces) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Trace* a, const Trace* b) { return a->start_time() < b->start_time(); });

  EncodedDataset ds;
  ds.schema = schema;
  ds.width = schema->width();
  for (const Trace* trace : ordered) {
    auto it = labels.find(trace->case_id);
    if (it == labels.end()) throw Error("missing label for case '" + trace->case_id + "'");
    for (const Prefix& p : extract_prefixes(*trace, max_prefix_len))
      ds.instances.push_back(encode_prefix(p, *schema, it->second));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// CSV import/export
// ---------------------------------------------------------------------------

namespace {

void csv_field(std::string& out, const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out += s;
    return;
  }
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

std::string double_to_string(double d) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

std::string dataset_to_csv(const EncodedDataset& dataset) {
  std::string out = "case_id,prefix_len,label";
  if (dataset.schema) {
    for (const auto& name : dataset.schema->column_names()) {
      out.push_back(',');
      csv_field(out, name);
    }
  } else {
    for (std::size_t i = 0; i < dataset.width; ++i) out += ",f" + std::to_string(i);
  }
  out.push_back('\n');
  for (const auto& inst : dataset.instances) {
    csv_field(out, inst.case_id);
    out += "," + std::to_string(inst.prefix_len) + "," + (inst.label ? "1" : "0");
    for (double v : inst.features) {
      out.push_back(',');
      out += double_to_string(v);
    }
    out.push_back('\n');
  }
  return out;
}

EncodedDataset dataset_from_csv(std::string_view text) {
  EncodedDataset ds;
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= text.size()) return {};
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  std::string_view header = next_line();
  if (header.empty()) throw Error("empty encoded dataset CSV");
  std::size_t n_cols = 1 + static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
  if (n_cols < 4) throw Error("encoded dataset CSV needs case_id,prefix_len,label plus features");
  ds.width = n_cols - 3;

  std::size_t row = 1;
  while (pos <= text.size()) {
    std::string_view line = next_line();
    if (line.empty()) {
      if (pos >= text.size()) break;
      continue;
    }
    ++row;
    EncodedInstance inst;
    inst.features.reserve(ds.width);
    std::size_t field = 0;
    std::size_t start = 0;
    // feature rows are written unquoted except possibly the case id
    bool quoted = !line.empty() && line[0] == '"';
    if (quoted) {
      std::string id;
      std::size_t i = 1;
      for (; i < line.size(); ++i) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            id.push_back('"');
            ++i;
          } else break;
        } else id.push_back(line[i]);
      }
      inst.case_id = std::move(id);
      start = i + 2;  // skip closing quote and comma
      field = 1;
    }
    while (field < n_cols) {
      std::size_t end = line.find(',', start);
      if (end == std::string_view::npos) end = line.size();
      std::string_view cell = line.substr(start, end - start);
      switch (field) {
        case 0: inst.case_id.assign(cell); break;
        case 1: inst.prefix_len = static_cast<std::size_t>(std::strtoul(std::string(cell).c_str(), nullptr, 10)); break;
        case 2: inst.label = cell == "1" || cell == "true"; break;
        default: {
          double v = 0.0;
          auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
          if (ec != std::errc() || p != cell.data() + cell.size())
            throw Error("row " + std::to_string(row) + ": bad feature value '" + std::string(cell) + "'");
          inst.features.push_back(v);
        }
      }
      ++field;
      start = end + 1;
    }
    if (inst.features.size() != ds.width)
      throw Error("row " + std::to_string(row) + ": expected " + std::to_string(ds.width) +
                  " features, got " + std::to_string(inst.features.size()));
    ds.instances.push_back(std::move(inst));
    if (pos >= text.size()) break;
  }
  return ds;
}

}  // namespace ppmbench
