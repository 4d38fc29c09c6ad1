#include <cmath>
#include <string>

#include "doctest.h"
#include "tickimpact/config.hpp"
#include "tickimpact/errors.hpp"

using namespace tickimpact;

namespace {

// Smallest config that passes validation; tests splice bad sections in.
const char* kBaseRun =
    "[period.p]\n"
    "start = 2013-01-02\n"
    "end = 2013-01-31\n"
    "[stock.A]\n"
    "group = g1\n"
    "trades = t.csv\n"
    "quotes = q.csv\n";

RunConfig from_text(const std::string& text) {
    return run_config_from_ini(IniFile::parse_text(text));
}

}  // namespace

TEST_CASE("config: ini text parsing") {
    IniFile ini = IniFile::parse_text(
        "top = 1\n"
        "# comment\n"
        "; also a comment\n"
        "[alpha]\n"
        "a = 1\n"
        "a = 2\n"
        "  b  =  spaced value  \n"
        "[ z.2 ]\n"
        "k = v\n"
        "[z.10]\n"
        "k = w\n");
    CHECK(ini.get("", "top") == "1");
    CHECK(ini.get("alpha", "a") == "2");  // later duplicate wins
    CHECK(ini.get("alpha", "b") == "spaced value");
    CHECK(ini.has("z.2"));  // header whitespace is trimmed
    CHECK(!ini.get("alpha", "missing").has_value());
    CHECK(!ini.get("missing", "a").has_value());
    auto z = ini.sections_with_prefix("z.");
    REQUIRE(z.size() == 2);
    CHECK(z[0] == "z.10");  // sorted, independent of file order
    CHECK(z[1] == "z.2");

    CHECK_THROWS_WITH_AS(IniFile::parse_text("[oops\n", "buf.ini"),
                         "buf.ini:1: unterminated section header", ParseError);
    CHECK_THROWS_WITH_AS(IniFile::parse_text("ok = 1\nnot a pair\n", "buf.ini"),
                         "buf.ini:2: expected key = value", ParseError);
    CHECK_THROWS_WITH_AS(IniFile::parse_text("= 3\n", "buf.ini"), "buf.ini:1: empty key",
                         ParseError);
    CHECK_THROWS_AS(IniFile::parse_file("/nonexistent/nowhere.ini"), IoError);
}

TEST_CASE("config: defaults") {
    RunConfig c = from_text(kBaseRun);
    CHECK(c.output_dir == "out");
    CHECK(c.quote_lag == 0);
    CHECK(c.per_stock_curves == false);

    CHECK(c.format.delimiter == ',');
    CHECK(c.format.skip_rows == 0);
    CHECK(c.format.stamp == TickFormat::Stamp::Iso8601);
    CHECK(c.format.timestamp_col == 0);
    CHECK(c.format.price_col == 1);
    CHECK(c.format.volume_col == 2);
    CHECK(c.format.bid_col == 1);
    CHECK(c.format.ask_col == 2);
    CHECK(c.format.max_error_rate == 0.01);

    CHECK(c.session.day_start == 9 * kMicrosPerHour);
    CHECK(c.session.day_end == 17 * kMicrosPerHour);
    REQUIRE(c.session.excluded_windows.size() == 2);
    CHECK(c.session.excluded_windows[0].begin == 9 * kMicrosPerHour);
    CHECK(c.session.excluded_windows[0].end == 9 * kMicrosPerHour + 10 * kMicrosPerMinute);
    CHECK(c.session.excluded_windows[1].begin == 16 * kMicrosPerHour + 50 * kMicrosPerMinute);
    CHECK(c.session.excluded_windows[1].end == 17 * kMicrosPerHour);
    CHECK(c.session.auction_windows.empty());
    CHECK(c.session.max_volume == 1'000'000);

    CHECK(c.bin_lo_log10 == -3.2);
    CHECK(c.bin_hi_log10 == 1.0);
    CHECK(c.n_impact_bins == 20);
    CHECK(c.impact_edges().edges == BinEdges::standard().edges);
    CHECK(c.threshold_log10 == -0.9);
    CHECK(c.volume_threshold() == std::pow(10.0, -0.9));

    CHECK(c.powerlaw.min_tail == 5);
    CHECK(c.powerlaw.max_candidates == 1000);
    CHECK(c.powerlaw.n_boot == 2500);
    CHECK(c.powerlaw.seed == 0);
    CHECK(c.powerlaw.threads == 1);
    CHECK(c.powerlaw.low_power_threshold == 50);

    CHECK(c.collapse.n_bins == 10);
    CHECK(c.collapse.grid_lo == -1.0);
    CHECK(c.collapse.grid_hi == 1.0);
    CHECK(c.collapse.grid_step == 0.01);

    REQUIRE(c.periods.size() == 1);
    CHECK(c.periods[0].name == "p");
    CHECK(c.periods[0].first_day == days_from_civil(2013, 1, 2));
    CHECK(c.periods[0].last_day == days_from_civil(2013, 1, 31));
    CHECK(!c.periods[0].n_days_override.has_value());

    REQUIRE(c.stocks.size() == 1);
    CHECK(c.stocks[0].stock_id == "A");
    CHECK(c.stocks[0].group_id == "g1");
    CHECK(c.stocks[0].trades_path == "t.csv");
    CHECK(c.stocks[0].quotes_path == "q.csv");
}

TEST_CASE("config: field errors name the exact location") {
    auto with = [](const std::string& extra) { return std::string(kBaseRun) + extra; };

    CHECK_THROWS_WITH_AS(from_text(with("[bins]\nn = 0\n")), "[bins] n: must be >= 1",
                         ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[bins]\nlo_log10 = 2\n")),
                         "[bins] hi_log10 must exceed lo_log10", ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[bins]\nlo_log10 = abc\n")),
                         "[bins] lo_log10: not a number: 'abc'", ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[session]\nday_start = 25:00\n")),
                         "[session] day_start: not a time of day: '25:00'", ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[session]\nexclude = 09:30\n")),
                         "[session] exclude: window needs 'HH:MM-HH:MM': '09:30'", ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[session]\nexclude = 09:xx-10:00\n")),
                         "[session] exclude: bad window time: '09:xx-10:00'", ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[format]\nstamp = nanos\n")),
                         "[format] stamp: expected iso8601 or epoch_micros, got 'nanos'",
                         ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[powerlaw]\nn_boot = 1.5\n")),
                         "[powerlaw] n_boot: not an integer: '1.5'", ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[run]\nper_stock_curves = maybe\n")),
                         "[run] per_stock_curves: not a boolean: 'maybe'", ConfigError);
    CHECK_THROWS_WITH_AS(from_text(with("[collapse]\ngrid_step = 0\n")),
                         "[collapse] grid_step: must be > 0", ConfigError);

    CHECK_THROWS_WITH_AS(
        from_text("[stock.A]\ngroup = g\ntrades = t\nquotes = q\n"),
        "no [period.*] sections defined", ConfigError);
    CHECK_THROWS_WITH_AS(
        from_text("[period.p]\nstart = 2013-01-02\nend = 2013-01-31\n"),
        "no [stock.*] sections defined", ConfigError);
    CHECK_THROWS_WITH_AS(
        from_text(std::string(kBaseRun) + "[stock.X]\ntrades = t\nquotes = q\n"),
        "[stock.X] group: required", ConfigError);
    CHECK_THROWS_WITH_AS(
        from_text(std::string(kBaseRun) + "[period.q]\nstart = 2013-03-01\n"),
        "[period.q] end: required", ConfigError);
    CHECK_THROWS_WITH_AS(
        from_text(std::string(kBaseRun) + "[period.q]\nstart = 2013-13-01\nend = 2013-12-31\n"),
        "[period.q] start: not a date: '2013-13-01'", ConfigError);
    CHECK_THROWS_WITH_AS(
        from_text("[period.p]\nstart = 2013-02-01\nend = 2013-01-01\n"
                  "[stock.A]\ngroup = g\ntrades = t\nquotes = q\n"),
        "[period.p] start is after end", ConfigError);
    CHECK_THROWS_WITH_AS(
        from_text(std::string(kBaseRun) + "[period.p]\nn_days = 0\n"),
        "[period.p] n_days: must be >= 1", ConfigError);
    // a bare "[period.]" has no name after the prefix and is not picked up
    RunConfig c = from_text(std::string(kBaseRun) + "[period.]\nstart = 2013-03-01\n");
    CHECK(c.periods.size() == 1);
}

TEST_CASE("config: overlapping periods are rejected in date order") {
    std::string stocks = "[stock.A]\ngroup = g\ntrades = t\nquotes = q\n";
    CHECK_THROWS_WITH_AS(
        from_text("[period.b]\nstart = 2013-01-04\nend = 2013-01-08\n"
                  "[period.a]\nstart = 2013-01-02\nend = 2013-01-05\n" +
                  stocks),
        "periods 'a' and 'b' overlap", ConfigError);
    // touching but disjoint ranges are fine
    CHECK_NOTHROW(from_text("[period.a]\nstart = 2013-01-02\nend = 2013-01-05\n"
                            "[period.b]\nstart = 2013-01-06\nend = 2013-01-08\n" +
                            stocks));
}

TEST_CASE("config: echo is a fixed point") {
    RunConfig c1 = from_text(
        "[run]\n"
        "output_dir = /tmp/run7\n"
        "quote_lag = 250\n"
        "per_stock_curves = yes\n"
        "[format]\n"
        "delimiter = tab\n"
        "skip_rows = 1\n"
        "stamp = epoch_micros\n"
        "timestamp_col = 2\n"
        "price_col = 0\n"
        "volume_col = 1\n"
        "bid_col = 3\n"
        "ask_col = 4\n"
        "max_error_rate = 0.05\n"
        "[session]\n"
        "day_start = 08:30\n"
        "day_end = 16:00\n"
        "exclude = 08:30-08:40, 12:00-12:30\n"
        "auction = 15:55-16:00\n"
        "max_volume = 500000\n"
        "[bins]\n"
        "lo_log10 = -2.5\n"
        "hi_log10 = 0.5\n"
        "n = 12\n"
        "[powerlaw]\n"
        "threshold_log10 = -1.1\n"
        "min_tail = 4\n"
        "max_candidates = 300\n"
        "n_boot = 100\n"
        "seed = 42\n"
        "threads = 3\n"
        "low_power_threshold = 25\n"
        "[collapse]\n"
        "n_bins = 8\n"
        "grid_lo = -0.8\n"
        "grid_hi = 0.8\n"
        "grid_step = 0.02\n"
        "refine_tol = 1e-7\n"
        "max_refine_iter = 150\n"
        "[period.early]\n"
        "start = 2013-01-02\n"
        "end = 2013-01-15\n"
        "n_days = 9\n"
        "[period.late]\n"
        "start = 2013-01-16\n"
        "end = 2013-01-31\n"
        "[stock.B]\n"
        "group = g2\n"
        "trades = b_t.csv\n"
        "quotes = b_q.csv\n"
        "[stock.A]\n"
        "group = g1\n"
        "trades = a_t.csv\n"
        "quotes = a_q.csv\n");

    CHECK(c1.format.delimiter == '\t');
    CHECK(c1.format.stamp == TickFormat::Stamp::EpochMicros);
    CHECK(c1.per_stock_curves == true);
    CHECK(c1.quote_lag == 250);
    REQUIRE(c1.session.excluded_windows.size() == 2);
    CHECK(c1.session.excluded_windows[1].begin == 12 * kMicrosPerHour);
    REQUIRE(c1.session.auction_windows.size() == 1);
    REQUIRE(c1.periods.size() == 2);
    CHECK(c1.periods[0].n_days_override == 9);
    CHECK(!c1.periods[1].n_days_override.has_value());
    REQUIRE(c1.stocks.size() == 2);
    CHECK(c1.stocks[0].stock_id == "A");  // section order is sorted, not file order
    CHECK(c1.stocks[1].stock_id == "B");

    std::string echo1 = run_config_to_ini(c1);
    RunConfig c2 = run_config_from_ini(IniFile::parse_text(echo1));
    std::string echo2 = run_config_to_ini(c2);
    CHECK(echo1 == echo2);
    CHECK(c2.output_dir == c1.output_dir);
    CHECK(c2.format.delimiter == c1.format.delimiter);
    CHECK(c2.format.max_error_rate == c1.format.max_error_rate);
    CHECK(c2.session.day_start == c1.session.day_start);
    CHECK(c2.bin_lo_log10 == c1.bin_lo_log10);
    CHECK(c2.collapse.refine_tol == c1.collapse.refine_tol);
    CHECK(c2.powerlaw.seed == c1.powerlaw.seed);
    CHECK(c2.periods[0].n_days_override == c1.periods[0].n_days_override);

    // the default config also echoes to a fixed point
    RunConfig d1 = from_text(kBaseRun);
    std::string de1 = run_config_to_ini(d1);
    CHECK(de1 == run_config_to_ini(run_config_from_ini(IniFile::parse_text(de1))));
}

TEST_CASE("config: scenario parsing") {
    MarketScenario sc = scenario_from_ini(IniFile::parse_text(
        "[scenario]\n"
        "seed = 99\n"
        "n_days = 3\n"
        "first_day = 2013-02-04\n"
        "[session]\n"
        "day_start = 10:00\n"
        "day_end = 15:00\n"
        "exclude =\n"
        "[group.g2]\n"
        "stocks = B, C\n"
        "c_target = 2e6\n"
        "alpha_impact = 0.25\n"
        "lambda = 1500\n"
        "trade_rate = 100\n"
        "mean_volume = 800\n"
        "volume_sigma = 0.7\n"
        "spread = 0.2\n"
        "mid0 = 50\n"
        "mid_volatility = 0.001\n"
        "noise_sigma = 0.3\n"
        "midquote_fraction = 0.15\n"
        "buy_probability = 0.6\n"
        "quote_gap = 500\n"
        "[group.g1]\n"
        "trade_rate = 10\n"));

    CHECK(sc.seed == 99);
    CHECK(sc.n_days == 3);
    CHECK(sc.first_day == days_from_civil(2013, 2, 4));
    CHECK(sc.session.day_start == 10 * kMicrosPerHour);
    CHECK(sc.session.excluded_windows.empty());

    REQUIRE(sc.groups.size() == 2);
    CHECK(sc.groups[0].group_id == "g1");  // sorted section order
    CHECK(sc.groups[0].trade_rate == 10.0);
    CHECK(sc.groups[0].stock_ids.empty());
    CHECK(sc.groups[1].group_id == "g2");
    REQUIRE(sc.groups[1].stock_ids.size() == 2);
    CHECK(sc.groups[1].stock_ids[0] == "B");
    CHECK(sc.groups[1].stock_ids[1] == "C");
    CHECK(sc.groups[1].c_target == 2e6);
    CHECK(sc.groups[1].alpha_impact == 0.25);
    CHECK(sc.groups[1].quote_gap == 500);
    CHECK(sc.groups[1].buy_probability == 0.6);

    // scenario validation is wired in
    CHECK_THROWS_WITH_AS(
        scenario_from_ini(IniFile::parse_text("[group.x]\ntrade_rate = 0\n")),
        "x: trade_rate must be > 0", ConfigError);
}
