#include "swiperec/timeutil.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "swiperec/error.hpp"

namespace swiperec {

namespace {

// Days since 1970-01-01 -> civil date (Howard Hinnant's algorithm).
CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

unsigned parse_number(std::string_view s, std::size_t pos, std::size_t len, const char* what) {
  if (pos + len > s.size()) throw Error(ErrorKind::Config, std::string("bad instant: missing ") + what);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  if (ec != std::errc() || ptr != s.data() + pos + len) {
    throw Error(ErrorKind::Config, std::string("bad instant: invalid ") + what + " in '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

CivilDate civil_from_ms(TimestampMs ms) {
  return civil_from_days(floor_div(ms, 86400000));
}

std::string month_key(TimestampMs ms) {
  CivilDate d = civil_from_ms(ms);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", d.year, d.month);
  return buf;
}

TimestampMs ms_from_civil(int year, unsigned month, unsigned day,
                          unsigned hour, unsigned minute, unsigned second) {
  const std::int64_t days = days_from_civil(year, month, day);
  return ((days * 24 + hour) * 60 + minute) * 60000 + static_cast<std::int64_t>(second) * 1000;
}

TimestampMs parse_instant(std::string_view text) {
  if (all_digits(text)) {
    TimestampMs value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorKind::Config, "bad instant: '" + std::string(text) + "'");
    }
    return value;
  }
  // YYYY-MM-DD[THH:MM[:SS]][Z]
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorKind::Config, "bad instant: '" + std::string(text) + "' (want epoch ms or YYYY-MM-DD[THH:MM[:SS]][Z])");
  }
  const unsigned year = parse_number(text, 0, 4, "year");
  const unsigned month = parse_number(text, 5, 2, "month");
  const unsigned day = parse_number(text, 8, 2, "day");
  if (month < 1 || month > 12 || day < 1 || day > 31) {
    throw Error(ErrorKind::Config, "bad instant: '" + std::string(text) + "' (month/day out of range)");
  }
  unsigned hour = 0, minute = 0, second = 0;
  std::string_view rest = text.substr(10);
  if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
  if (!rest.empty()) {
    if (rest[0] != 'T' || rest.size() < 6 || rest[3] != ':') {
      throw Error(ErrorKind::Config, "bad instant: '" + std::string(text) + "'");
    }
    hour = parse_number(rest, 1, 2, "hour");
    minute = parse_number(rest, 4, 2, "minute");
    if (rest.size() > 6) {
      if (rest.size() != 9 || rest[6] != ':') {
        throw Error(ErrorKind::Config, "bad instant: '" + std::string(text) + "'");
      }
      second = parse_number(rest, 7, 2, "second");
    }
    if (hour > 23 || minute > 59 || second > 60) {
      throw Error(ErrorKind::Config, "bad instant: '" + std::string(text) + "' (time out of range)");
    }
  }
  return ms_from_civil(static_cast<int>(year), month, day, hour, minute, second);
}

TimeWindow parse_window(std::string_view text) {
  const std::size_t sep = text.find("..");
  if (sep == std::string_view::npos) {
    throw Error(ErrorKind::Config, "bad window: '" + std::string(text) + "' (want FROM..TO)");
  }
  TimeWindow w;
  w.from_ms = parse_instant(text.substr(0, sep));
  w.to_ms = parse_instant(text.substr(sep + 2));
  if (w.to_ms < w.from_ms) {
    throw Error(ErrorKind::Config, "bad window: '" + std::string(text) + "' (TO before FROM)");
  }
  return w;
}

std::string format_instant_utc(TimestampMs ms) {
  const CivilDate d = civil_from_ms(ms);
  const std::int64_t msec_of_day = ms - floor_div(ms, 86400000) * 86400000;
  const int hour = static_cast<int>(msec_of_day / 3600000);
  const int minute = static_cast<int>((msec_of_day / 60000) % 60);
  const int second = static_cast<int>((msec_of_day / 1000) % 60);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", d.year, d.month, d.day, hour, minute, second);
  return buf;
}

}  // namespace swiperec
