#include "tickimpact/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace tickimpact {

namespace {

bool parse_int(std::string_view s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::int32_t days_from_civil(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const sys_days d = year_month_day(std::chrono::year(year), std::chrono::month(month),
                                      std::chrono::day(day));
    return static_cast<std::int32_t>(d.time_since_epoch().count());
}

std::optional<std::int32_t> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y, m, d;
    if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) ||
        !parse_int(s.substr(8, 2), d))
        return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(unsigned(m)),
                                    std::chrono::day(unsigned(d))};
    if (!ymd.ok()) return std::nullopt;
    return days_from_civil(y, unsigned(m), unsigned(d));
}

std::string format_date(std::int32_t day) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

std::optional<Micros> parse_time_of_day(std::string_view s) {
    if (s.size() != 5 && s.size() != 8) return std::nullopt;
    if (s[2] != ':') return std::nullopt;
    int h, m, sec = 0;
    if (!parse_int(s.substr(0, 2), h) || !parse_int(s.substr(3, 2), m)) return std::nullopt;
    if (s.size() == 8) {
        if (s[5] != ':' || !parse_int(s.substr(6, 2), sec)) return std::nullopt;
    }
    if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 59) return std::nullopt;
    return h * kMicrosPerHour + m * kMicrosPerMinute + sec * kMicrosPerSecond;
}

std::string format_time_of_day(Micros tod) {
    int h = int(tod / kMicrosPerHour);
    int m = int((tod / kMicrosPerMinute) % 60);
    int s = int((tod / kMicrosPerSecond) % 60);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", h, m, s);
    return buf;
}

std::optional<Micros> parse_iso8601(std::string_view s) {
    if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
    // date part
    if (s.size() < 19) return std::nullopt;
    auto day = parse_date(s.substr(0, 10));
    if (!day) return std::nullopt;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto tod = parse_time_of_day(s.substr(11, 8));
    if (!tod) return std::nullopt;
    Micros frac = 0;
    if (s.size() > 19) {
        if (s[19] != '.') return std::nullopt;
        std::string_view digits = s.substr(20);
        if (digits.empty() || digits.size() > 6) return std::nullopt;
        Micros scale = kMicrosPerSecond;
        for (char c : digits) {
            if (c < '0' || c > '9') return std::nullopt;
            scale /= 10;
            frac += (c - '0') * scale;
        }
    }
    return Micros(*day) * kMicrosPerDay + *tod + frac;
}

std::string format_iso8601(Micros ts) {
    std::int32_t day = day_of(ts);
    Micros tod = time_of_day(ts);
    Micros frac = tod % kMicrosPerSecond;
    char buf[16];
    std::string out = format_date(day);
    out += 'T';
    out += format_time_of_day(tod);
    std::snprintf(buf, sizeof(buf), ".%06lld", static_cast<long long>(frac));
    out += buf;
    return out;
}

}  // namespace tickimpact
