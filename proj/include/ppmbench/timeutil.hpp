#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ppmbench {

// Absolute instant, milliseconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t millis = 0;
  auto operator<=>(const Timestamp&) const = default;
};

std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

// ISO-8601: YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM|-HH:MM|+HHMM]; no zone means UTC.
Timestamp parse_iso8601(std::string_view text);

// Always UTC with explicit milliseconds: 2023-01-02T08:00:00.000Z
std::string format_iso8601(Timestamp ts);

// strptime-style subset used by the CSV mapping: %Y %m %d %H %M %S %f plus literals.
Timestamp parse_timestamp_format(std::string_view text, std::string_view format);

// hh:mm:ss with whole seconds (hours not wrapped at 24)
std::string format_hms(double seconds);

}  // namespace ppmbench
