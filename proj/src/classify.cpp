#include "tickimpact/classify.hpp"

#include <algorithm>

namespace tickimpact {

std::optional<QuoteEvent> prevailing_quote(std::span<const QuoteEvent> quotes, Micros t,
                                           Micros lag) {
    Micros cutoff = t - lag;
    auto it = std::lower_bound(quotes.begin(), quotes.end(), cutoff,
                               [](const QuoteEvent& q, Micros v) { return q.timestamp < v; });
    if (it == quotes.begin()) return std::nullopt;
    return *(it - 1);
}

Direction lee_ready(const AggregatedTrade& trade, const QuoteEvent& prevailing,
                    std::optional<double> prev_distinct_price) {
    double mid = prevailing.mid();
    if (trade.vwap > mid) return Direction::BuyerInitiated;
    if (trade.vwap < mid) return Direction::SellerInitiated;
    if (!prev_distinct_price) return Direction::Indeterminate;
    if (trade.vwap > *prev_distinct_price) return Direction::BuyerInitiated;
    if (trade.vwap < *prev_distinct_price) return Direction::SellerInitiated;
    return Direction::Indeterminate;
}

ClassifiedStream classify_stream(std::span<const AggregatedTrade> trades,
                                 std::span<const QuoteEvent> quotes, Micros lag) {
    ClassifiedStream out;
    out.counts.input = std::int64_t(trades.size());
    out.trades.reserve(trades.size());

    std::size_t q = 0;  // quotes[q-1] is the prevailing quote once advanced
    std::optional<double> prev_price;     // price of the previous trade
    std::optional<double> prev_distinct;  // most recent price differing from prev_price

    for (const auto& trade : trades) {
        while (q < quotes.size() && quotes[q].timestamp < trade.timestamp - lag) ++q;

        std::optional<double> tick_ref;
        if (prev_price) tick_ref = (trade.vwap != *prev_price) ? prev_price : prev_distinct;

        if (q == 0) {
            ++out.counts.dropped_no_quote;
        } else {
            const QuoteEvent& quote = quotes[q - 1];
            Direction dir = lee_ready(trade, quote, tick_ref);
            if (dir == Direction::Indeterminate) ++out.counts.indeterminate;
            out.trades.push_back({trade, dir, quote.mid()});
            ++out.counts.classified;
        }

        if (prev_price && trade.vwap != *prev_price) prev_distinct = prev_price;
        prev_price = trade.vwap;
    }
    return out;
}

}  // namespace tickimpact
