#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "ppmbench/error.hpp"
#include "ppmbench/timeutil.hpp"

namespace ppmbench {

enum class ValueKind { String, Integer, Real, Boolean, Timestamp };

const char* value_kind_name(ValueKind kind);
ValueKind value_kind_from_name(const std::string& name);

// Attribute payload value: one of the five XES core kinds.
class Value {
 public:
  Value() : v_(std::string{}) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(bool b) : v_(b) {}
  Value(Timestamp t) : v_(t) {}

  ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }

  const std::string& as_string() const { return std::get<std::string>(v_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(v_); }
  double as_real() const { return std::get<double>(v_); }
  bool as_boolean() const { return std::get<bool>(v_); }
  Timestamp as_timestamp() const { return std::get<Timestamp>(v_); }

  // Numeric view used by the encoder; strings have none.
  double numeric(Timestamp trace_start) const {
    switch (kind()) {
      case ValueKind::Integer: return static_cast<double>(as_integer());
      case ValueKind::Real: return as_real();
      case ValueKind::Boolean: return as_boolean() ? 1.0 : 0.0;
      case ValueKind::Timestamp:
        return static_cast<double>(as_timestamp().millis - trace_start.millis) / 1000.0;
      case ValueKind::String: break;
    }
    throw Error("string attribute has no numeric view");
  }

  bool operator==(const Value& other) const = default;

 private:
  std::variant<std::string, std::int64_t, double, bool, Timestamp> v_;
};

using AttrMap = std::map<std::string, Value>;

}  // namespace ppmbench
