#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tickimpact/classify.hpp"
#include "tickimpact/collapse.hpp"
#include "tickimpact/config.hpp"
#include "tickimpact/impact.hpp"
#include "tickimpact/ingest.hpp"
#include "tickimpact/powerlaw.hpp"

namespace tickimpact {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct StockParseCounts {
    std::string stock_id;
    RejectionCounts trades;
    RejectionCounts quotes;
};

struct StockStageCounts {
    std::string stock_id;
    std::int64_t out_of_period_trades = 0;
    std::int64_t out_of_period_quotes = 0;
    FilterCounts trade_filter;
    FilterCounts quote_filter;
    std::int64_t aggregated_trades = 0;
    std::int64_t deduped_quotes = 0;
    ClassifyCounts classify;
    ImpactCounts impact;
};

struct DirectionResult {
    BinnedCurve curve;
    std::optional<PowerLawFit> fit;
    std::string fit_error;  // nonempty when the tail fit was not possible
};

struct GroupPeriodResult {
    std::string group_id;
    std::string period_name;
    bool failed = false;
    std::string error;
    std::int64_t n_days = 0;  // distinct active days unless overridden
    LiquidityProxy proxy;
    DirectionResult buyer;
    DirectionResult seller;
    DailyDistributions daily;
    std::vector<StockStageCounts> stocks;
    std::int64_t observations = 0;
};

struct PeriodCollapse {
    std::string period_name;
    Direction direction = Direction::BuyerInitiated;
    bool attempted = false;
    bool failed = false;
    std::string error;
    CollapseResult result;
};

struct RunReport {
    std::string version{kToolVersion};
    RunConfig config;
    std::vector<StockParseCounts> parse_counts;
    std::vector<GroupPeriodResult> groups;  // period-major, group-sorted
    std::vector<PeriodCollapse> collapses;
    std::vector<std::string> files;  // written, relative to output_dir
};

// Full ingest -> classify -> impact -> fit -> collapse run over every
// period and group in the config. A failing group is recorded and skipped;
// the rest of the run completes. All outputs land under config.output_dir
// and are written atomically (temp file + rename).
RunReport run_pipeline(const RunConfig& config);

std::string report_to_json(const RunReport& report);

// Plot-ready projections (one delimited file per figure panel) under
// <output_dir>/plots. Returns the files written, relative to output_dir.
std::vector<std::string> emit_plot_data(const RunReport& report);

void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace tickimpact
