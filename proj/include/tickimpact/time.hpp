#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tickimpact {

// All event times are integer microseconds since the unix epoch (UTC).
using Micros = std::int64_t;

inline constexpr Micros kMicrosPerSecond = 1'000'000;
inline constexpr Micros kMicrosPerMinute = 60 * kMicrosPerSecond;
inline constexpr Micros kMicrosPerHour = 60 * kMicrosPerMinute;
inline constexpr Micros kMicrosPerDay = 24 * kMicrosPerHour;

inline std::int32_t day_of(Micros ts) { return static_cast<std::int32_t>(ts / kMicrosPerDay); }
inline Micros time_of_day(Micros ts) { return ts % kMicrosPerDay; }

// "2013-03-04T10:15:30.123456" (fraction optional, up to 6 digits, zero-padded;
// ' ' accepted for 'T'; trailing 'Z' accepted).
std::optional<Micros> parse_iso8601(std::string_view s);
std::string format_iso8601(Micros ts);

// "HH:MM" or "HH:MM:SS" -> microseconds past midnight.
std::optional<Micros> parse_time_of_day(std::string_view s);
std::string format_time_of_day(Micros tod);

// "2013-01-01" -> days since epoch.
std::optional<std::int32_t> parse_date(std::string_view s);
std::string format_date(std::int32_t day);

std::int32_t days_from_civil(int year, unsigned month, unsigned day);

}  // namespace tickimpact
