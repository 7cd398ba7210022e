#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "swiperec/types.hpp"

namespace swiperec {

struct CivilDate {
  int year = 1970;
  unsigned month = 1;  // 1..12
  unsigned day = 1;    // 1..31
};

/// UTC calendar date of an epoch-milliseconds instant.
CivilDate civil_from_ms(TimestampMs ms);

/// "YYYY-MM" UTC month key, the grouping used for monthly swipe counts.
std::string month_key(TimestampMs ms);

/// Epoch milliseconds of a UTC date/time.
TimestampMs ms_from_civil(int year, unsigned month, unsigned day,
                          unsigned hour = 0, unsigned minute = 0, unsigned second = 0);

/// Parses an instant: either plain epoch milliseconds ("1704067200000") or
/// "YYYY-MM-DD[THH:MM[:SS]][Z]" (UTC). Throws Error(Config) on bad input.
TimestampMs parse_instant(std::string_view text);

/// Parses "FROM..TO" into a half-open window. Throws Error(Config).
TimeWindow parse_window(std::string_view text);

std::string format_instant_utc(TimestampMs ms);

}  // namespace swiperec
