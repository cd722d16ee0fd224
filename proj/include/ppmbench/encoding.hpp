#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ppmbench/eventlog.hpp"

namespace ppmbench {

// Category list with two reserved trailing slots: PAD (index size()) and
// OTHER (index size()+1). Fixed after fit.
struct CategoricalVocab {
  std::vector<std::string> categories;  // lexicographically ordered

  std::size_t width() const { return categories.size() + 2; }
  std::size_t pad_index() const { return categories.size(); }
  std::size_t other_index() const { return categories.size() + 1; }
  std::size_t index_of(const std::string& value) const;  // OTHER slot when unseen
};

struct FeatureSpec {
  std::string name;
  ValueKind kind = ValueKind::String;
  CategoricalVocab vocab;  // populated for String kind only

  std::size_t width() const { return kind == ValueKind::String ? vocab.width() : 1; }
};

// Complex index encoding layout:
//   [case features] [for i in 1..max_prefix_len: activity one-hot, event features_i]
class EncodingSchema {
 public:
  static EncodingSchema fit(const std::vector<Trace>& traces, std::size_t max_prefix_len);

  std::size_t width() const { return width_; }
  std::size_t max_prefix_len() const { return max_prefix_len_; }
  const std::vector<FeatureSpec>& case_features() const { return case_features_; }
  const std::vector<FeatureSpec>& event_features() const { return event_features_; }
  const CategoricalVocab& activity_vocab() const { return activity_vocab_; }

  std::vector<std::string> column_names() const;
  std::string fingerprint() const;  // stable hex hash of the layout

 private:
  std::size_t max_prefix_len_ = 0;
  std::size_t width_ = 0;
  std::vector<FeatureSpec> case_features_;
  std::vector<FeatureSpec> event_features_;
  CategoricalVocab activity_vocab_;
};

struct EncodedInstance {
  std::vector<double> features;
  bool label = false;
  std::string case_id;
  std::size_t prefix_len = 0;
};

struct EncodedDataset {
  std::shared_ptr<const EncodingSchema> schema;  // null when loaded from CSV
  std::size_t width = 0;
  std::vector<EncodedInstance> instances;
};

struct Prefix {
  const Trace* trace = nullptr;
  std::size_t length = 0;
};

// One prefix per length 1..min(len(trace), max_prefix_len).
std::vector<Prefix> extract_prefixes(const Trace& trace, std::size_t max_prefix_len);

EncodedInstance encode_prefix(const Prefix& prefix, const EncodingSchema& schema, bool label);

// Deterministic: traces in start-time order (stable), prefixes by ascending
// length. Every trace must have a label. max_prefix_len must match the schema.
EncodedDataset encode_set(const std::vector<Trace>& traces,
                          std::shared_ptr<const EncodingSchema> schema,
                          const std::map<std::string, bool>& labels, std::size_t max_prefix_len);

std::string dataset_to_csv(const EncodedDataset& dataset);
EncodedDataset dataset_from_csv(std::string_view text);

}  // namespace ppmbench
