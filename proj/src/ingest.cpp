#include "tickimpact/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tickimpact/errors.hpp"

namespace tickimpact {

void SessionFilter::validate() const {
    if (day_start < 0 || day_end > kMicrosPerDay || day_start >= day_end)
        throw ConfigError("session: day_start must precede day_end within one day");
    if (max_volume <= 0) throw ConfigError("session: max_volume must be positive");
    auto check = [&](const std::vector<TimeWindow>& ws, const char* what) {
        for (const auto& w : ws) {
            if (w.begin >= w.end) throw ConfigError(std::string("session: empty ") + what);
            if (w.begin < day_start || w.end > day_end)
                throw ConfigError(std::string("session: ") + what +
                                  " window outside trading day");
        }
    };
    check(excluded_windows, "excluded");
    check(auction_windows, "auction");
}

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::BuyerInitiated: return "buyer";
        case Direction::SellerInitiated: return "seller";
        case Direction::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

std::optional<Direction> direction_from_string(std::string_view s) {
    if (s == "buyer") return Direction::BuyerInitiated;
    if (s == "seller") return Direction::SellerInitiated;
    if (s == "indeterminate") return Direction::Indeterminate;
    return std::nullopt;
}

std::map<std::string, std::int64_t> RejectionCounts::as_map() const {
    return {{"total_rows", total_rows},
            {"accepted", accepted},
            {"malformed", malformed},
            {"nonpositive_price", nonpositive_price},
            {"nonpositive_volume", nonpositive_volume},
            {"crossed_quote", crossed_quote}};
}

std::map<std::string, std::int64_t> FilterCounts::as_map() const {
    return {{"input", input},
            {"kept", kept},
            {"outside_session", outside_session},
            {"excluded_window", excluded_window},
            {"auction_window", auction_window},
            {"over_volume_cap", over_volume_cap}};
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    char buf[64];
    if (s.size() >= sizeof(buf)) return false;
    std::copy(s.begin(), s.end(), buf);
    buf[s.size()] = '\0';
    char* end = nullptr;
    out = std::strtod(buf, &end);
    return end == buf + s.size();
}

bool parse_int64(std::string_view s, std::int64_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_stamp(std::string_view s, TickFormat::Stamp kind, Micros& out) {
    if (kind == TickFormat::Stamp::EpochMicros) return parse_int64(s, out);
    auto ts = parse_iso8601(s);
    if (!ts) return false;
    out = *ts;
    return true;
}

// Shared row loop: `consume` inspects one row's fields and returns false for
// a malformed row. Business-rule rejections are tallied inside `consume`.
template <typename Consume>
RejectionCounts scan_rows(std::string_view text, const TickFormat& fmt, std::string_view origin,
                          Consume&& consume) {
    RejectionCounts rc;
    std::size_t pos = 0;
    int row = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++row;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (row <= fmt.skip_rows) continue;
        if (line.empty()) continue;
        ++rc.total_rows;
        if (!consume(split_fields(line, fmt.delimiter), rc)) ++rc.malformed;
    }
    if (rc.total_rows > 0 &&
        double(rc.malformed) > fmt.max_error_rate * double(rc.total_rows)) {
        std::ostringstream msg;
        msg << origin << ": " << rc.malformed << " of " << rc.total_rows
            << " rows malformed, above the " << fmt.max_error_rate << " abort threshold";
        throw ParseError(msg.str());
    }
    return rc;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed on " + path.string());
    return std::move(buf).str();
}

}  // namespace

ParsedTrades parse_trades_text(std::string_view text, const TickFormat& fmt,
                               std::string_view origin) {
    ParsedTrades out;
    int needed = std::max({fmt.timestamp_col, fmt.price_col, fmt.volume_col}) + 1;
    out.rejections = scan_rows(text, fmt, origin, [&](const auto& fields, RejectionCounts& rc) {
        if (int(fields.size()) < needed) return false;
        TradeEvent ev;
        if (!parse_stamp(fields[fmt.timestamp_col], fmt.stamp, ev.timestamp)) return false;
        if (!parse_double(fields[fmt.price_col], ev.price)) return false;
        if (!parse_int64(fields[fmt.volume_col], ev.volume)) return false;
        if (ev.price <= 0.0) {
            ++rc.nonpositive_price;
            return true;
        }
        if (ev.volume <= 0) {
            ++rc.nonpositive_volume;
            return true;
        }
        ++rc.accepted;
        out.events.push_back(ev);
        return true;
    });
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const TradeEvent& a, const TradeEvent& b) { return a.timestamp < b.timestamp; });
    return out;
}

ParsedQuotes parse_quotes_text(std::string_view text, const TickFormat& fmt,
                               std::string_view origin) {
    ParsedQuotes out;
    int needed = std::max({fmt.timestamp_col, fmt.bid_col, fmt.ask_col}) + 1;
    out.rejections = scan_rows(text, fmt, origin, [&](const auto& fields, RejectionCounts& rc) {
        if (int(fields.size()) < needed) return false;
        QuoteEvent ev;
        if (!parse_stamp(fields[fmt.timestamp_col], fmt.stamp, ev.timestamp)) return false;
        if (!parse_double(fields[fmt.bid_col], ev.bid)) return false;
        if (!parse_double(fields[fmt.ask_col], ev.ask)) return false;
        if (ev.bid <= 0.0 || ev.ask <= 0.0) {
            ++rc.nonpositive_price;
            return true;
        }
        if (ev.bid > ev.ask) {
            ++rc.crossed_quote;
            return true;
        }
        ++rc.accepted;
        out.events.push_back(ev);
        return true;
    });
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const QuoteEvent& a, const QuoteEvent& b) { return a.timestamp < b.timestamp; });
    return out;
}

ParsedTrades parse_trades(const std::filesystem::path& path, const TickFormat& fmt) {
    return parse_trades_text(read_file(path), fmt, path.string());
}

ParsedQuotes parse_quotes(const std::filesystem::path& path, const TickFormat& fmt) {
    return parse_quotes_text(read_file(path), fmt, path.string());
}

FilteredTrades filter_trades(std::span<const TradeEvent> events, const SessionFilter& filter) {
    FilteredTrades out;
    out.counts.input = std::int64_t(events.size());
    for (const auto& ev : events) {
        Micros tod = time_of_day(ev.timestamp);
        if (tod < filter.day_start || tod >= filter.day_end) {
            ++out.counts.outside_session;
            continue;
        }
        bool skip = false;
        for (const auto& w : filter.excluded_windows)
            if (w.contains(tod)) {
                ++out.counts.excluded_window;
                skip = true;
                break;
            }
        if (skip) continue;
        for (const auto& w : filter.auction_windows)
            if (w.contains(tod)) {
                ++out.counts.auction_window;
                skip = true;
                break;
            }
        if (skip) continue;
        if (ev.volume > filter.max_volume) {
            ++out.counts.over_volume_cap;
            continue;
        }
        out.events.push_back(ev);
    }
    out.counts.kept = std::int64_t(out.events.size());
    return out;
}

FilteredQuotes filter_quotes(std::span<const QuoteEvent> events, const SessionFilter& filter) {
    FilteredQuotes out;
    out.counts.input = std::int64_t(events.size());
    for (const auto& ev : events) {
        Micros tod = time_of_day(ev.timestamp);
        if (tod < filter.day_start || tod >= filter.day_end) {
            ++out.counts.outside_session;
            continue;
        }
        bool skip = false;
        for (const auto& w : filter.excluded_windows)
            if (w.contains(tod)) {
                ++out.counts.excluded_window;
                skip = true;
                break;
            }
        if (skip) continue;
        for (const auto& w : filter.auction_windows)
            if (w.contains(tod)) {
                ++out.counts.auction_window;
                skip = true;
                break;
            }
        if (skip) continue;
        out.events.push_back(ev);
    }
    out.counts.kept = std::int64_t(out.events.size());
    return out;
}

std::vector<AggregatedTrade> aggregate_trades(std::span<const TradeEvent> trades) {
    std::vector<AggregatedTrade> out;
    std::size_t i = 0;
    while (i < trades.size()) {
        std::size_t j = i;
        double value = 0.0;
        std::int64_t volume = 0;
        while (j < trades.size() && trades[j].timestamp == trades[i].timestamp) {
            value += trades[j].price * double(trades[j].volume);
            volume += trades[j].volume;
            ++j;
        }
        out.push_back({trades[i].timestamp, value / double(volume), volume});
        i = j;
    }
    return out;
}

std::vector<QuoteEvent> dedupe_quotes(std::span<const QuoteEvent> quotes) {
    std::vector<QuoteEvent> out;
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        if (i + 1 < quotes.size() && quotes[i + 1].timestamp == quotes[i].timestamp) continue;
        out.push_back(quotes[i]);
    }
    return out;
}

}  // namespace tickimpact
