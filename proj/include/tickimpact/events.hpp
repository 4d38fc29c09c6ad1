#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tickimpact/time.hpp"

namespace tickimpact {

struct TradeEvent {
    Micros timestamp = 0;
    double price = 0.0;       // > 0 after validation
    std::int64_t volume = 0;  // shares, > 0 after validation
};

struct QuoteEvent {
    Micros timestamp = 0;
    double bid = 0.0;
    double ask = 0.0;
    double mid() const { return 0.5 * (bid + ask); }
};

// One merged event per distinct trade timestamp.
struct AggregatedTrade {
    Micros timestamp = 0;
    double vwap = 0.0;
    std::int64_t total_volume = 0;
};

// Half-open [begin, end) interval of time-of-day microseconds.
struct TimeWindow {
    Micros begin = 0;
    Micros end = 0;
    bool contains(Micros tod) const { return tod >= begin && tod < end; }
};

// Session-level cleaning rules: continuous-trade bounds, excluded intraday
// windows, auction windows, and the off-market volume cap.
struct SessionFilter {
    Micros day_start = 9 * kMicrosPerHour;
    Micros day_end = 17 * kMicrosPerHour;
    std::vector<TimeWindow> excluded_windows = {
        {9 * kMicrosPerHour, 9 * kMicrosPerHour + 10 * kMicrosPerMinute},
        {16 * kMicrosPerHour + 50 * kMicrosPerMinute, 17 * kMicrosPerHour}};
    std::vector<TimeWindow> auction_windows;
    std::int64_t max_volume = 1'000'000;

    // true if the timestamp's time-of-day is inside the session and outside
    // every excluded/auction window
    bool allows(Micros timestamp) const {
        Micros tod = time_of_day(timestamp);
        if (tod < day_start || tod >= day_end) return false;
        for (const auto& w : excluded_windows)
            if (w.contains(tod)) return false;
        for (const auto& w : auction_windows)
            if (w.contains(tod)) return false;
        return true;
    }

    void validate() const;  // throws ConfigError
};

enum class Direction { BuyerInitiated, SellerInitiated, Indeterminate };

std::string_view to_string(Direction d);
std::optional<Direction> direction_from_string(std::string_view s);

struct ClassifiedTrade {
    AggregatedTrade trade;
    Direction direction = Direction::Indeterminate;
    double prevailing_mid = 0.0;
};

}  // namespace tickimpact
