#include <cstdint>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tickimpact/errors.hpp"
#include "tickimpact/ingest.hpp"
#include "tickimpact/rng.hpp"
#include "tickimpact/time.hpp"

using namespace tickimpact;

namespace {

Micros at(const char* iso) { return *parse_iso8601(iso); }

TickFormat lenient_csv() {
    TickFormat f;
    f.skip_rows = 1;
    f.max_error_rate = 0.5;
    return f;
}

}  // namespace

TEST_CASE("ingest: trade rows parse with per-reason rejection buckets") {
    const char* text =
        "timestamp,price,volume\n"
        "2013-01-02T10:00:00.000001,100.5,200\n"
        "2013-01-02T10:00:00.000002,bogus,10\n"
        "2013-01-02T10:00:00.000003,-5,10\n"
        "2013-01-02T10:00:00.000004,5,0\n"
        "2013-01-02T10:00:00.000005,7.25,40\n"
        "short,row\n";
    auto parsed = parse_trades_text(text, lenient_csv());
    const auto& rc = parsed.rejections;
    CHECK(rc.total_rows == 6);
    CHECK(rc.accepted == 2);
    CHECK(rc.malformed == 2);
    CHECK(rc.nonpositive_price == 1);
    CHECK(rc.nonpositive_volume == 1);
    CHECK(rc.crossed_quote == 0);
    CHECK(rc.total_rows == rc.accepted + rc.malformed + rc.nonpositive_price +
                               rc.nonpositive_volume + rc.crossed_quote);

    REQUIRE(parsed.events.size() == 2);
    CHECK(parsed.events[0].timestamp == at("2013-01-02T10:00:00.000001"));
    CHECK(parsed.events[0].price == 100.5);
    CHECK(parsed.events[0].volume == 200);
    CHECK(parsed.events[1].price == 7.25);
    CHECK(parsed.events[1].volume == 40);
}

TEST_CASE("ingest: quote rows reject crossed and nonpositive prices") {
    const char* text =
        "timestamp,bid,ask\n"
        "2013-01-02T10:00:00,10.0,10.5\n"
        "2013-01-02T10:00:01,10.6,10.4\n"
        "2013-01-02T10:00:02,10.0,10.0\n"
        "2013-01-02T10:00:03,-1,10.5\n";
    auto parsed = parse_quotes_text(text, lenient_csv());
    CHECK(parsed.rejections.accepted == 2);  // bid == ask is locked, not crossed
    CHECK(parsed.rejections.crossed_quote == 1);
    CHECK(parsed.rejections.nonpositive_price == 1);
    REQUIRE(parsed.events.size() == 2);
    CHECK(parsed.events[0].mid() == 10.25);
    CHECK(parsed.events[1].mid() == 10.0);
}

TEST_CASE("ingest: malformed rows above the error-rate threshold abort") {
    std::string text = "timestamp,price,volume\n";
    for (int i = 0; i < 8; ++i)
        text += "2013-01-02T10:00:0" + std::to_string(i) + ",10,5\n";
    text += "junk\njunk\n";
    TickFormat f;
    f.skip_rows = 1;
    f.max_error_rate = 0.1;  // 2 of 10 malformed > 10%
    CHECK_THROWS_AS(parse_trades_text(text, f, "feed.csv"), ParseError);
    try {
        parse_trades_text(text, f, "feed.csv");
    } catch (const Error& e) {
        CHECK(e.kind == "parse");
        CHECK(std::string(e.what()).find("feed.csv") != std::string::npos);
    }
    f.max_error_rate = 0.5;
    CHECK_NOTHROW(parse_trades_text(text, f, "feed.csv"));
}

TEST_CASE("ingest: rows are sorted by timestamp, ties keep file order") {
    const char* text =
        "timestamp,price,volume\n"
        "2013-01-02T10:00:03,3.0,1\n"
        "2013-01-02T10:00:01,1.0,1\n"
        "2013-01-02T10:00:02,2.0,1\n"
        "2013-01-02T10:00:01,1.5,1\n";
    auto parsed = parse_trades_text(text, lenient_csv());
    REQUIRE(parsed.events.size() == 4);
    CHECK(parsed.events[0].price == 1.0);  // first ts=1 row in file order
    CHECK(parsed.events[1].price == 1.5);
    CHECK(parsed.events[2].price == 2.0);
    CHECK(parsed.events[3].price == 3.0);
}

TEST_CASE("ingest: custom delimiters, column maps and epoch stamps") {
    TickFormat f;
    f.delimiter = '\t';
    f.stamp = TickFormat::Stamp::EpochMicros;
    f.timestamp_col = 1;
    f.price_col = 0;
    f.volume_col = 2;
    auto parsed = parse_trades_text("3.5\t1000\t7\n", f);
    REQUIRE(parsed.events.size() == 1);
    CHECK(parsed.events[0].timestamp == 1000);
    CHECK(parsed.events[0].price == 3.5);
    CHECK(parsed.events[0].volume == 7);
}

TEST_CASE("ingest: session filter buckets every rejection") {
    SessionFilter session;  // 09:00-17:00 minus 09:00-09:10 and 16:50-17:00
    auto trade = [&](const char* iso, std::int64_t vol) {
        return TradeEvent{at(iso), 10.0, vol};
    };
    std::vector<TradeEvent> trades = {
        trade("2013-01-02T08:59:59.999999", 10),  // before session
        trade("2013-01-02T09:05:00", 10),         // opening exclusion
        trade("2013-01-02T09:10:00", 10),         // exclusion end is open -> kept
        trade("2013-01-02T09:30:00", 2000000),    // volume cap
        trade("2013-01-02T12:00:00", 10),         // kept
        trade("2013-01-02T16:50:00", 10),         // closing exclusion
        trade("2013-01-02T17:00:00", 10),         // day end is exclusive
    };
    auto out = filter_trades(trades, session);
    CHECK(out.counts.input == 7);
    CHECK(out.counts.kept == 2);
    CHECK(out.counts.outside_session == 2);
    CHECK(out.counts.excluded_window == 2);
    CHECK(out.counts.auction_window == 0);
    CHECK(out.counts.over_volume_cap == 1);
    CHECK(out.counts.input == out.counts.kept + out.counts.outside_session +
                                  out.counts.excluded_window + out.counts.auction_window +
                                  out.counts.over_volume_cap);
    REQUIRE(out.events.size() == 2);
    CHECK(out.events[0].timestamp == at("2013-01-02T09:10:00"));
    CHECK(out.events[1].timestamp == at("2013-01-02T12:00:00"));

    session.auction_windows = {{12 * kMicrosPerHour, 12 * kMicrosPerHour + kMicrosPerMinute}};
    auto out2 = filter_trades(trades, session);
    CHECK(out2.counts.auction_window == 1);
    CHECK(out2.counts.kept == 1);

    // quotes share the windows but have no volume cap
    std::vector<QuoteEvent> quotes = {{at("2013-01-02T09:05:00"), 10.0, 10.5},
                                      {at("2013-01-02T12:00:00"), 10.0, 10.5}};
    auto fq = filter_quotes(quotes, SessionFilter{});
    CHECK(fq.counts.kept == 1);
    CHECK(fq.counts.excluded_window == 1);
}

TEST_CASE("ingest: session filter validation") {
    SessionFilter bad;
    bad.day_start = bad.day_end;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    SessionFilter outside;
    outside.excluded_windows = {{8 * kMicrosPerHour, 9 * kMicrosPerHour + 1}};
    CHECK_THROWS_AS(outside.validate(), ConfigError);
    SessionFilter vol;
    vol.max_volume = 0;
    CHECK_THROWS_AS(vol.validate(), ConfigError);
    CHECK_NOTHROW(SessionFilter{}.validate());
}

TEST_CASE("ingest: aggregation merges same-timestamp trades at the vwap") {
    std::vector<TradeEvent> trades = {
        {1000, 10.0, 100}, {1000, 11.0, 300}, {2000, 5.0, 10}};
    auto agg = aggregate_trades(trades);
    REQUIRE(agg.size() == 2);
    CHECK(agg[0].timestamp == 1000);
    CHECK(agg[0].vwap == (10.0 * 100 + 11.0 * 300) / 400.0);  // 10.75
    CHECK(agg[0].total_volume == 400);
    CHECK(agg[1].vwap == 5.0);
    CHECK(agg[1].total_volume == 10);
}

TEST_CASE("ingest: aggregation matches a naive merge on random tapes") {
    Rng rng(99);
    for (int inst = 0; inst < 50; ++inst) {
        std::vector<TradeEvent> trades;
        Micros t = 0;
        std::int64_t in_volume = 0;
        std::size_t n = 1 + rng.index(40);
        for (std::size_t i = 0; i < n; ++i) {
            t += Micros(rng.index(3));  // duplicate timestamps are common
            TradeEvent ev{t, 1.0 + rng.uniform() * 100.0, 1 + std::int64_t(rng.index(500))};
            in_volume += ev.volume;
            trades.push_back(ev);
        }
        auto got = aggregate_trades(trades);
        auto want = oracles::naive_aggregate(trades);
        REQUIRE(got.size() == want.size());
        std::int64_t out_volume = 0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].timestamp == want[i].timestamp);
            CHECK(got[i].total_volume == want[i].total_volume);
            CHECK(got[i].vwap == doctest::Approx(want[i].vwap).epsilon(1e-12));
            if (i > 0) CHECK(got[i].timestamp > got[i - 1].timestamp);
            out_volume += got[i].total_volume;
        }
        CHECK(out_volume == in_volume);  // shares conserved
    }
}

TEST_CASE("ingest: dedupe keeps the last quote of each timestamp") {
    std::vector<QuoteEvent> quotes = {{1, 1.0, 2.0}, {1, 1.1, 2.1}, {2, 1.2, 2.2},
                                      {3, 1.3, 2.3}, {3, 1.4, 2.4}, {3, 1.5, 2.5}};
    auto got = dedupe_quotes(quotes);
    REQUIRE(got.size() == 3);
    CHECK(got[0].bid == 1.1);
    CHECK(got[1].bid == 1.2);
    CHECK(got[2].bid == 1.5);

    Rng rng(123);
    for (int inst = 0; inst < 50; ++inst) {
        std::vector<QuoteEvent> qs;
        Micros t = 0;
        std::size_t n = rng.index(30);
        for (std::size_t i = 0; i < n; ++i) {
            t += Micros(rng.index(3));
            qs.push_back({t, rng.uniform(1.0, 2.0), rng.uniform(2.0, 3.0)});
        }
        auto a = dedupe_quotes(qs);
        auto b = oracles::naive_dedupe(qs);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].timestamp == b[i].timestamp);
            CHECK(a[i].bid == b[i].bid);
            CHECK(a[i].ask == b[i].ask);
        }
    }
}
