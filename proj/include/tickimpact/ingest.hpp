#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tickimpact/events.hpp"

namespace tickimpact {

// Column layout for delimited tick files. The vendor format behind the
// original dataset is proprietary, so inputs are described by a mapping
// instead of a fixed schema.
struct TickFormat {
    enum class Stamp { Iso8601, EpochMicros };

    char delimiter = ',';
    int skip_rows = 0;  // header lines
    Stamp stamp = Stamp::Iso8601;
    int timestamp_col = 0;
    int price_col = 1;   // trades
    int volume_col = 2;  // trades
    int bid_col = 1;     // quotes
    int ask_col = 2;     // quotes
    // abort when malformed rows exceed this fraction of total rows
    double max_error_rate = 0.01;
};

// Per-reason rejection tallies for one parsed file. Nothing is dropped
// silently: every input row lands in exactly one bucket.
struct RejectionCounts {
    std::int64_t total_rows = 0;
    std::int64_t accepted = 0;
    std::int64_t malformed = 0;
    std::int64_t nonpositive_price = 0;
    std::int64_t nonpositive_volume = 0;
    std::int64_t crossed_quote = 0;

    std::map<std::string, std::int64_t> as_map() const;
};

struct ParsedTrades {
    std::vector<TradeEvent> events;  // nondecreasing timestamps
    RejectionCounts rejections;
};

struct ParsedQuotes {
    std::vector<QuoteEvent> events;  // nondecreasing; file order kept within a timestamp
    RejectionCounts rejections;
};

ParsedTrades parse_trades(const std::filesystem::path& path, const TickFormat& format = {});
ParsedQuotes parse_quotes(const std::filesystem::path& path, const TickFormat& format = {});

// Same parsers over an in-memory buffer.
ParsedTrades parse_trades_text(std::string_view text, const TickFormat& format = {},
                               std::string_view origin = "<buffer>");
ParsedQuotes parse_quotes_text(std::string_view text, const TickFormat& format = {},
                               std::string_view origin = "<buffer>");

struct FilterCounts {
    std::int64_t input = 0;
    std::int64_t kept = 0;
    std::int64_t outside_session = 0;
    std::int64_t excluded_window = 0;
    std::int64_t auction_window = 0;
    std::int64_t over_volume_cap = 0;

    std::map<std::string, std::int64_t> as_map() const;
};

struct FilteredTrades {
    std::vector<TradeEvent> events;
    FilterCounts counts;
};

struct FilteredQuotes {
    std::vector<QuoteEvent> events;
    FilterCounts counts;
};

// Pure filters; relative order preserved. The volume cap applies to raw
// trades, before same-timestamp aggregation (it targets single off-market
// prints).
FilteredTrades filter_trades(std::span<const TradeEvent> events, const SessionFilter& filter);
FilteredQuotes filter_quotes(std::span<const QuoteEvent> events, const SessionFilter& filter);

// Merge same-timestamp trades into one event at the volume-weighted average
// price with summed volume. Input must be timestamp-ordered; output is
// strictly increasing.
std::vector<AggregatedTrade> aggregate_trades(std::span<const TradeEvent> trades);

// Keep the last quote (in file order) of each timestamp.
std::vector<QuoteEvent> dedupe_quotes(std::span<const QuoteEvent> quotes);

}  // namespace tickimpact
