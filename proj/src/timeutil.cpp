#include "ppmbench/timeutil.hpp"

#include <cmath>
#include <cstdio>

#include "ppmbench/error.hpp"

namespace ppmbench {

// Howard Hinnant's civil calendar algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp + (mp < 10 ? 3 : -9);
  year = static_cast<int>(y + (month <= 2));
}

namespace {

bool parse_uint(std::string_view s, std::size_t& pos, int digits, int& out) {
  if (pos + digits > s.size()) return false;
  int v = 0;
  for (int i = 0; i < digits; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += digits;
  out = v;
  return true;
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  std::size_t pos = 0;
  int year, month, day, hour, minute, second;
  auto fail = [&](const char* what) -> Timestamp {
    throw ParseError(std::string("invalid ISO-8601 timestamp '") + std::string(text) + "': " + what, pos);
  };
  if (!parse_uint(text, pos, 4, year)) return fail("year");
  if (pos >= text.size() || text[pos] != '-') return fail("expected '-'");
  ++pos;
  if (!parse_uint(text, pos, 2, month)) return fail("month");
  if (pos >= text.size() || text[pos] != '-') return fail("expected '-'");
  ++pos;
  if (!parse_uint(text, pos, 2, day)) return fail("day");
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) return fail("expected 'T'");
  ++pos;
  if (!parse_uint(text, pos, 2, hour)) return fail("hour");
  if (pos >= text.size() || text[pos] != ':') return fail("expected ':'");
  ++pos;
  if (!parse_uint(text, pos, 2, minute)) return fail("minute");
  if (pos >= text.size() || text[pos] != ':') return fail("expected ':'");
  ++pos;
  if (!parse_uint(text, pos, 2, second)) return fail("second");

  std::int64_t millis = 0;
  if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
    ++pos;
    std::int64_t frac = 0;
    int ndigits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (ndigits < 3) frac = frac * 10 + (text[pos] - '0');
      ++ndigits;
      ++pos;
    }
    if (ndigits == 0) return fail("fractional seconds");
    while (ndigits < 3) {
      frac *= 10;
      ++ndigits;
    }
    millis = frac;
  }

  std::int64_t offset_minutes = 0;
  if (pos < text.size()) {
    char c = text[pos];
    if (c == 'Z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int sign = (c == '-') ? -1 : 1;
      ++pos;
      int oh = 0, om = 0;
      if (!parse_uint(text, pos, 2, oh)) return fail("zone hours");
      if (pos < text.size() && text[pos] == ':') ++pos;
      if (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        if (!parse_uint(text, pos, 2, om)) return fail("zone minutes");
      }
      offset_minutes = sign * (oh * 60 + om);
    } else {
      return fail("trailing characters");
    }
  }
  if (pos != text.size()) return fail("trailing characters");
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
    return fail("field out of range");

  std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  std::int64_t total =
      ((days * 24 + hour) * 60 + minute - offset_minutes) * 60 + second;
  return Timestamp{total * 1000 + millis};
}

std::string format_iso8601(Timestamp ts) {
  std::int64_t ms = ts.millis;
  std::int64_t sec = ms >= 0 ? ms / 1000 : (ms - 999) / 1000;
  int milli = static_cast<int>(ms - sec * 1000);
  std::int64_t days = sec >= 0 ? sec / 86400 : (sec - 86399) / 86400;
  int rem = static_cast<int>(sec - days * 86400);
  int year;
  unsigned month, day;
  civil_from_days(days, year, month, day);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", year, month, day,
                rem / 3600, (rem / 60) % 60, rem % 60, milli);
  return buf;
}

Timestamp parse_timestamp_format(std::string_view text, std::string_view format) {
  std::size_t tp = 0;
  int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
  std::int64_t millis = 0;
  for (std::size_t fp = 0; fp < format.size(); ++fp) {
    if (format[fp] == '%' && fp + 1 < format.size()) {
      char spec = format[++fp];
      bool ok = true;
      switch (spec) {
        case 'Y': ok = parse_uint(text, tp, 4, year); break;
        case 'm': ok = parse_uint(text, tp, 2, month); break;
        case 'd': ok = parse_uint(text, tp, 2, day); break;
        case 'H': ok = parse_uint(text, tp, 2, hour); break;
        case 'M': ok = parse_uint(text, tp, 2, minute); break;
        case 'S': ok = parse_uint(text, tp, 2, second); break;
        case 'f': {
          std::int64_t frac = 0;
          int n = 0;
          while (tp < text.size() && text[tp] >= '0' && text[tp] <= '9') {
            if (n < 3) frac = frac * 10 + (text[tp] - '0');
            ++n;
            ++tp;
          }
          ok = n > 0;
          while (n > 0 && n < 3) {
            frac *= 10;
            ++n;
          }
          millis = frac;
          break;
        }
        case '%':
          ok = tp < text.size() && text[tp] == '%';
          ++tp;
          break;
        default:
          throw Error(std::string("unsupported timestamp format specifier %") + spec);
      }
      if (!ok)
        throw ParseError("timestamp '" + std::string(text) + "' does not match format '" +
                             std::string(format) + "'",
                         tp);
    } else {
      if (tp >= text.size() || text[tp] != format[fp])
        throw ParseError("timestamp '" + std::string(text) + "' does not match format '" +
                             std::string(format) + "'",
                         tp);
      ++tp;
    }
  }
  if (tp != text.size())
    throw ParseError("trailing characters in timestamp '" + std::string(text) + "'", tp);
  std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  std::int64_t total = ((days * 24 + hour) * 60 + minute) * 60 + second;
  return Timestamp{total * 1000 + millis};
}

std::string format_hms(double seconds) {
  if (seconds < 0) seconds = 0;
  std::int64_t s = static_cast<std::int64_t>(std::llround(seconds));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld", static_cast<long long>(s / 3600),
                static_cast<long long>((s / 60) % 60), static_cast<long long>(s % 60));
  return buf;
}

}  // namespace ppmbench
