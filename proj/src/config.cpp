#include "tickimpact/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tickimpact/errors.hpp"

namespace tickimpact {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string location(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
}

double parse_double_or_throw(const std::string& section, const std::string& key,
                             const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v))
        throw ConfigError(location(section, key) + ": not a number: '" + value + "'");
    return v;
}

std::int64_t parse_int_or_throw(const std::string& section, const std::string& key,
                                const std::string& value) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size())
        throw ConfigError(location(section, key) + ": not an integer: '" + value + "'");
    return v;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

IniFile IniFile::parse_text(std::string_view text, std::string_view origin) {
    IniFile ini;
    std::string current;  // keys before any [section] live under ""
    ini.sections[current];
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        std::string_view t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError(std::string(origin) + ":" + std::to_string(line_no) +
                                 ": unterminated section header");
            current = std::string(trim(t.substr(1, t.size() - 2)));
            ini.sections[current];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(std::string(origin) + ":" + std::to_string(line_no) +
                             ": expected key = value");
        std::string key(trim(t.substr(0, eq)));
        std::string value(trim(t.substr(eq + 1)));
        if (key.empty())
            throw ParseError(std::string(origin) + ":" + std::to_string(line_no) +
                             ": empty key");
        ini.sections[current][key] = value;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path.string());
}

std::optional<std::string> IniFile::get(const std::string& section,
                                        const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

std::vector<std::string> IniFile::sections_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [name, _] : sections)
        if (name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0)
            out.push_back(name);
    return out;  // std::map iteration is already sorted
}

std::optional<std::string> SectionView::raw(const std::string& key) const {
    return ini.get(name, key);
}

std::string SectionView::get_string(const std::string& key, std::string fallback) const {
    auto v = raw(key);
    return v ? *v : fallback;
}

std::string SectionView::require_string(const std::string& key) const {
    auto v = raw(key);
    if (!v || v->empty()) throw ConfigError(location(name, key) + ": required");
    return *v;
}

double SectionView::get_double(const std::string& key, double fallback) const {
    auto v = raw(key);
    return v ? parse_double_or_throw(name, key, *v) : fallback;
}

std::int64_t SectionView::get_int(const std::string& key, std::int64_t fallback) const {
    auto v = raw(key);
    return v ? parse_int_or_throw(name, key, *v) : fallback;
}

bool SectionView::get_bool(const std::string& key, bool fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError(location(name, key) + ": not a boolean: '" + *v + "'");
}

Micros SectionView::get_time_of_day(const std::string& key, Micros fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    auto tod = parse_time_of_day(*v);
    if (!tod) throw ConfigError(location(name, key) + ": not a time of day: '" + *v + "'");
    return *tod;
}

std::int32_t SectionView::get_date(const std::string& key, std::int32_t fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    auto day = parse_date(*v);
    if (!day) throw ConfigError(location(name, key) + ": not a date: '" + *v + "'");
    return *day;
}

std::vector<std::string> SectionView::get_list(const std::string& key) const {
    std::vector<std::string> out;
    auto v = raw(key);
    if (!v) return out;
    std::string_view rest = *v;
    while (!rest.empty()) {
        std::size_t comma = rest.find(',');
        std::string_view item = trim(rest.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::vector<TimeWindow> SectionView::get_windows(const std::string& key,
                                                 std::vector<TimeWindow> fallback) const {
    if (!raw(key)) return fallback;
    std::vector<TimeWindow> out;
    for (const auto& item : get_list(key)) {
        std::size_t dash = item.find('-');
        if (dash == std::string::npos)
            throw ConfigError(location(name, key) + ": window needs 'HH:MM-HH:MM': '" + item +
                              "'");
        auto b = parse_time_of_day(trim(std::string_view(item).substr(0, dash)));
        auto e = parse_time_of_day(trim(std::string_view(item).substr(dash + 1)));
        if (!b || !e)
            throw ConfigError(location(name, key) + ": bad window time: '" + item + "'");
        out.push_back({*b, *e});
    }
    return out;
}

namespace {

TickFormat format_from_ini(const IniFile& ini) {
    SectionView s{ini, "format"};
    TickFormat f;
    std::string delim = s.get_string("delimiter", ",");
    f.delimiter = delim == "tab" ? '\t' : (delim.empty() ? ',' : delim[0]);
    f.skip_rows = int(s.get_int("skip_rows", f.skip_rows));
    std::string stamp = s.get_string("stamp", "iso8601");
    if (stamp == "iso8601")
        f.stamp = TickFormat::Stamp::Iso8601;
    else if (stamp == "epoch_micros")
        f.stamp = TickFormat::Stamp::EpochMicros;
    else
        throw ConfigError("[format] stamp: expected iso8601 or epoch_micros, got '" + stamp +
                          "'");
    f.timestamp_col = int(s.get_int("timestamp_col", f.timestamp_col));
    f.price_col = int(s.get_int("price_col", f.price_col));
    f.volume_col = int(s.get_int("volume_col", f.volume_col));
    f.bid_col = int(s.get_int("bid_col", f.bid_col));
    f.ask_col = int(s.get_int("ask_col", f.ask_col));
    f.max_error_rate = s.get_double("max_error_rate", f.max_error_rate);
    return f;
}

SessionFilter session_from_ini(const IniFile& ini) {
    SectionView s{ini, "session"};
    SessionFilter f;
    f.day_start = s.get_time_of_day("day_start", f.day_start);
    f.day_end = s.get_time_of_day("day_end", f.day_end);
    f.excluded_windows = s.get_windows("exclude", f.excluded_windows);
    f.auction_windows = s.get_windows("auction", f.auction_windows);
    f.max_volume = s.get_int("max_volume", f.max_volume);
    return f;
}

std::string windows_to_string(const std::vector<TimeWindow>& windows) {
    std::string out;
    for (const auto& w : windows) {
        if (!out.empty()) out += ", ";
        out += format_time_of_day(w.begin) + "-" + format_time_of_day(w.end);
    }
    return out;
}

}  // namespace

BinEdges RunConfig::impact_edges() const {
    return BinEdges::log_spaced(std::pow(10.0, bin_lo_log10), std::pow(10.0, bin_hi_log10),
                                n_impact_bins);
}

double RunConfig::volume_threshold() const { return std::pow(10.0, threshold_log10); }

void RunConfig::validate() const {
    session.validate();
    if (!(bin_hi_log10 > bin_lo_log10))
        throw ConfigError("[bins] hi_log10 must exceed lo_log10");
    if (n_impact_bins < 1) throw ConfigError("[bins] n: must be >= 1");
    if (!(collapse.grid_step > 0.0))
        throw ConfigError("[collapse] grid_step: must be > 0");
    if (!(collapse.grid_hi > collapse.grid_lo))
        throw ConfigError("[collapse] grid_hi must exceed grid_lo");
    if (collapse.n_bins < 1) throw ConfigError("[collapse] n_bins: must be >= 1");
    if (periods.empty()) throw ConfigError("no [period.*] sections defined");
    for (const auto& p : periods) {
        if (p.first_day > p.last_day)
            throw ConfigError("[period." + p.name + "] start is after end");
        if (p.n_days_override && *p.n_days_override < 1)
            throw ConfigError("[period." + p.name + "] n_days: must be >= 1");
    }
    std::vector<Period> sorted(periods.begin(), periods.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const Period& a, const Period& b) { return a.first_day < b.first_day; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].first_day <= sorted[i - 1].last_day)
            throw ConfigError("periods '" + sorted[i - 1].name + "' and '" + sorted[i].name +
                              "' overlap");
    if (stocks.empty()) throw ConfigError("no [stock.*] sections defined");
    for (const auto& s : stocks) {
        if (s.group_id.empty())
            throw ConfigError("[stock." + s.stock_id + "] group: required");
        if (s.trades_path.empty())
            throw ConfigError("[stock." + s.stock_id + "] trades: required");
        if (s.quotes_path.empty())
            throw ConfigError("[stock." + s.stock_id + "] quotes: required");
    }
}

RunConfig run_config_from_ini(const IniFile& ini) {
    RunConfig c;
    SectionView run{ini, "run"};
    c.output_dir = run.get_string("output_dir", c.output_dir.string());
    c.quote_lag = run.get_int("quote_lag", c.quote_lag);
    c.per_stock_curves = run.get_bool("per_stock_curves", c.per_stock_curves);

    c.format = format_from_ini(ini);
    c.session = session_from_ini(ini);

    SectionView bins{ini, "bins"};
    c.bin_lo_log10 = bins.get_double("lo_log10", c.bin_lo_log10);
    c.bin_hi_log10 = bins.get_double("hi_log10", c.bin_hi_log10);
    c.n_impact_bins = std::size_t(bins.get_int("n", std::int64_t(c.n_impact_bins)));

    SectionView pl{ini, "powerlaw"};
    c.threshold_log10 = pl.get_double("threshold_log10", c.threshold_log10);
    c.powerlaw.min_tail = std::size_t(pl.get_int("min_tail", std::int64_t(c.powerlaw.min_tail)));
    c.powerlaw.max_candidates =
        std::size_t(pl.get_int("max_candidates", std::int64_t(c.powerlaw.max_candidates)));
    c.powerlaw.n_boot = pl.get_int("n_boot", c.powerlaw.n_boot);
    c.powerlaw.seed = std::uint64_t(pl.get_int("seed", std::int64_t(c.powerlaw.seed)));
    c.powerlaw.threads = unsigned(pl.get_int("threads", c.powerlaw.threads));
    c.powerlaw.low_power_threshold = std::size_t(
        pl.get_int("low_power_threshold", std::int64_t(c.powerlaw.low_power_threshold)));

    SectionView col{ini, "collapse"};
    c.collapse.n_bins = std::size_t(col.get_int("n_bins", std::int64_t(c.collapse.n_bins)));
    c.collapse.grid_lo = col.get_double("grid_lo", c.collapse.grid_lo);
    c.collapse.grid_hi = col.get_double("grid_hi", c.collapse.grid_hi);
    c.collapse.grid_step = col.get_double("grid_step", c.collapse.grid_step);
    c.collapse.refine_tol = col.get_double("refine_tol", c.collapse.refine_tol);
    c.collapse.max_refine_iter =
        std::size_t(col.get_int("max_refine_iter", std::int64_t(c.collapse.max_refine_iter)));

    for (const auto& sec : ini.sections_with_prefix("period.")) {
        SectionView s{ini, sec};
        Period p;
        p.name = sec.substr(std::string("period.").size());
        if (p.name.empty()) throw ConfigError("[" + sec + "]: empty period name");
        p.first_day = s.get_date("start", 0);
        p.last_day = s.get_date("end", 0);
        if (!s.raw("start")) throw ConfigError(location(sec, "start") + ": required");
        if (!s.raw("end")) throw ConfigError(location(sec, "end") + ": required");
        if (s.raw("n_days")) p.n_days_override = s.get_int("n_days", 0);
        c.periods.push_back(std::move(p));
    }
    for (const auto& sec : ini.sections_with_prefix("stock.")) {
        SectionView s{ini, sec};
        StockInput in;
        in.stock_id = sec.substr(std::string("stock.").size());
        if (in.stock_id.empty()) throw ConfigError("[" + sec + "]: empty stock id");
        in.group_id = s.require_string("group");
        in.trades_path = s.require_string("trades");
        in.quotes_path = s.require_string("quotes");
        c.stocks.push_back(std::move(in));
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_ini(IniFile::parse_file(path));
}

std::string run_config_to_ini(const RunConfig& c) {
    std::ostringstream out;
    out << "[run]\n";
    out << "output_dir = " << c.output_dir.string() << "\n";
    out << "quote_lag = " << c.quote_lag << "\n";
    out << "per_stock_curves = " << (c.per_stock_curves ? "true" : "false") << "\n";
    out << "\n[format]\n";
    out << "delimiter = " << (c.format.delimiter == '\t' ? "tab" : std::string(1, c.format.delimiter))
        << "\n";
    out << "skip_rows = " << c.format.skip_rows << "\n";
    out << "stamp = "
        << (c.format.stamp == TickFormat::Stamp::Iso8601 ? "iso8601" : "epoch_micros") << "\n";
    out << "timestamp_col = " << c.format.timestamp_col << "\n";
    out << "price_col = " << c.format.price_col << "\n";
    out << "volume_col = " << c.format.volume_col << "\n";
    out << "bid_col = " << c.format.bid_col << "\n";
    out << "ask_col = " << c.format.ask_col << "\n";
    out << "max_error_rate = " << fmt_double(c.format.max_error_rate) << "\n";
    out << "\n[session]\n";
    out << "day_start = " << format_time_of_day(c.session.day_start) << "\n";
    out << "day_end = " << format_time_of_day(c.session.day_end) << "\n";
    out << "exclude = " << windows_to_string(c.session.excluded_windows) << "\n";
    out << "auction = " << windows_to_string(c.session.auction_windows) << "\n";
    out << "max_volume = " << c.session.max_volume << "\n";
    out << "\n[bins]\n";
    out << "lo_log10 = " << fmt_double(c.bin_lo_log10) << "\n";
    out << "hi_log10 = " << fmt_double(c.bin_hi_log10) << "\n";
    out << "n = " << c.n_impact_bins << "\n";
    out << "\n[powerlaw]\n";
    out << "threshold_log10 = " << fmt_double(c.threshold_log10) << "\n";
    out << "min_tail = " << c.powerlaw.min_tail << "\n";
    out << "max_candidates = " << c.powerlaw.max_candidates << "\n";
    out << "n_boot = " << c.powerlaw.n_boot << "\n";
    out << "seed = " << c.powerlaw.seed << "\n";
    out << "threads = " << c.powerlaw.threads << "\n";
    out << "low_power_threshold = " << c.powerlaw.low_power_threshold << "\n";
    out << "\n[collapse]\n";
    out << "n_bins = " << c.collapse.n_bins << "\n";
    out << "grid_lo = " << fmt_double(c.collapse.grid_lo) << "\n";
    out << "grid_hi = " << fmt_double(c.collapse.grid_hi) << "\n";
    out << "grid_step = " << fmt_double(c.collapse.grid_step) << "\n";
    out << "refine_tol = " << fmt_double(c.collapse.refine_tol) << "\n";
    out << "max_refine_iter = " << c.collapse.max_refine_iter << "\n";
    for (const auto& p : c.periods) {
        out << "\n[period." << p.name << "]\n";
        out << "start = " << format_date(p.first_day) << "\n";
        out << "end = " << format_date(p.last_day) << "\n";
        if (p.n_days_override) out << "n_days = " << *p.n_days_override << "\n";
    }
    for (const auto& s : c.stocks) {
        out << "\n[stock." << s.stock_id << "]\n";
        out << "group = " << s.group_id << "\n";
        out << "trades = " << s.trades_path.string() << "\n";
        out << "quotes = " << s.quotes_path.string() << "\n";
    }
    return out.str();
}

MarketScenario scenario_from_ini(const IniFile& ini) {
    MarketScenario sc;
    SectionView s{ini, "scenario"};
    sc.seed = std::uint64_t(s.get_int("seed", std::int64_t(sc.seed)));
    sc.n_days = s.get_int("n_days", sc.n_days);
    sc.first_day = s.get_date("first_day", sc.first_day);
    sc.session = session_from_ini(ini);

    for (const auto& sec : ini.sections_with_prefix("group.")) {
        SectionView g{ini, sec};
        GroupSpec spec;
        spec.group_id = sec.substr(std::string("group.").size());
        if (spec.group_id.empty()) throw ConfigError("[" + sec + "]: empty group id");
        spec.stock_ids = g.get_list("stocks");
        spec.c_target = g.get_double("c_target", spec.c_target);
        spec.alpha_impact = g.get_double("alpha_impact", spec.alpha_impact);
        spec.lambda = g.get_double("lambda", spec.lambda);
        spec.trade_rate = g.get_double("trade_rate", spec.trade_rate);
        spec.mean_volume = g.get_double("mean_volume", spec.mean_volume);
        spec.volume_sigma = g.get_double("volume_sigma", spec.volume_sigma);
        spec.spread = g.get_double("spread", spec.spread);
        spec.mid0 = g.get_double("mid0", spec.mid0);
        spec.mid_volatility = g.get_double("mid_volatility", spec.mid_volatility);
        spec.noise_sigma = g.get_double("noise_sigma", spec.noise_sigma);
        spec.midquote_fraction = g.get_double("midquote_fraction", spec.midquote_fraction);
        spec.buy_probability = g.get_double("buy_probability", spec.buy_probability);
        spec.quote_gap = g.get_int("quote_gap", spec.quote_gap);
        sc.groups.push_back(std::move(spec));
    }
    sc.validate();
    return sc;
}

MarketScenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_ini(IniFile::parse_file(path));
}

}  // namespace tickimpact
