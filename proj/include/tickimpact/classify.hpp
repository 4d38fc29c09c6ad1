#pragma once

#include <optional>
#include <span>

#include "tickimpact/events.hpp"

namespace tickimpact {

// Latest quote with timestamp < t - lag. `lag` defaults to 0 (the prevailing
// quote is strictly before the trade); a negative lag admits quotes stamped
// at the trade's own microsecond.
std::optional<QuoteEvent> prevailing_quote(std::span<const QuoteEvent> quotes, Micros t,
                                           Micros lag = 0);

// Quote rule with tick-rule fallback. `prev_distinct_price` is the most
// recent earlier trade price different from this trade's price (zero-tick
// extension); pass nullopt when no such price exists.
Direction lee_ready(const AggregatedTrade& trade, const QuoteEvent& prevailing,
                    std::optional<double> prev_distinct_price);

struct ClassifyCounts {
    std::int64_t input = 0;
    std::int64_t classified = 0;
    std::int64_t dropped_no_quote = 0;
    std::int64_t indeterminate = 0;
};

struct ClassifiedStream {
    std::vector<ClassifiedTrade> trades;
    ClassifyCounts counts;
};

// Single forward pass over both streams. Trades with no prevailing quote are
// dropped and counted. The tick-rule state is carried over every input trade
// (dropped ones included; their prices are real prints).
ClassifiedStream classify_stream(std::span<const AggregatedTrade> trades,
                                 std::span<const QuoteEvent> quotes, Micros lag = 0);

}  // namespace tickimpact
