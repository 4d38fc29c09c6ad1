#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tickimpact/collapse.hpp"
#include "tickimpact/events.hpp"
#include "tickimpact/ingest.hpp"
#include "tickimpact/powerlaw.hpp"
#include "tickimpact/synth.hpp"
#include "tickimpact/time.hpp"

namespace tickimpact {

// Minimal INI reader: [section] headers, key = value lines, '#'/';' comments,
// comma-separated lists. Later duplicate keys win.
struct IniFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static IniFile parse_file(const std::filesystem::path& path);
    static IniFile parse_text(std::string_view text, std::string_view origin = "<buffer>");

    bool has(const std::string& section) const { return sections.count(section) != 0; }
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    // Section names matching "prefix.rest", in file-independent sorted order.
    std::vector<std::string> sections_with_prefix(const std::string& prefix) const;
};

// Typed accessors that fail with the exact [section] key location.
struct SectionView {
    const IniFile& ini;
    std::string name;

    std::optional<std::string> raw(const std::string& key) const;
    std::string get_string(const std::string& key, std::string fallback = {}) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    Micros get_time_of_day(const std::string& key, Micros fallback) const;
    std::int32_t get_date(const std::string& key, std::int32_t fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<TimeWindow> get_windows(const std::string& key,
                                        std::vector<TimeWindow> fallback) const;
};

struct Period {
    std::string name;
    std::int32_t first_day = 0;  // inclusive, days since epoch
    std::int32_t last_day = 0;   // inclusive
    std::optional<std::int64_t> n_days_override;  // else distinct active days
};

struct StockInput {
    std::string stock_id;
    std::string group_id;
    std::filesystem::path trades_path;
    std::filesystem::path quotes_path;
};

struct RunConfig {
    std::filesystem::path output_dir = "out";
    TickFormat format;
    SessionFilter session;

    double bin_lo_log10 = -3.2;  // impact-curve bin span, log10 units
    double bin_hi_log10 = 1.0;
    std::size_t n_impact_bins = 20;
    double threshold_log10 = -0.9;  // tail-fit / collapse volume cutoff

    PowerLawConfig powerlaw;
    CollapseConfig collapse;
    Micros quote_lag = 0;
    bool per_stock_curves = false;  // diagnostic: bin per stock, skip collapse

    std::vector<Period> periods;
    std::vector<StockInput> stocks;

    BinEdges impact_edges() const;
    double volume_threshold() const;
    void validate() const;  // throws ConfigError with a field path
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_ini(const IniFile& ini);
std::string run_config_to_ini(const RunConfig& config);  // echo for reproducible re-runs

MarketScenario load_scenario(const std::filesystem::path& path);
MarketScenario scenario_from_ini(const IniFile& ini);

}  // namespace tickimpact
