#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tickimpact/events.hpp"
#include "tickimpact/time.hpp"

namespace tickimpact {

// One trade's measured price response: the log-midquote change across the
// trade plus its volume. omega holds the raw share count until
// normalize_volumes rescales it to units of the stock's mean trade volume.
struct ImpactObservation {
    std::string stock_id;
    std::int64_t day = 0;  // days since epoch
    double omega = 0.0;
    double raw_volume = 0.0;
    double delta_p = 0.0;  // ln(mid_after) - ln(mid_before), signed
    double price = 0.0;    // trade vwap, kept for daily averages
    Direction direction = Direction::Indeterminate;
};

struct ImpactCounts {
    std::int64_t input = 0;
    std::int64_t computed = 0;
    std::int64_t dropped_no_after_quote = 0;
    std::map<std::string, std::int64_t> as_map() const;
};

struct ImpactResult {
    std::vector<ImpactObservation> observations;
    ImpactCounts counts;
};

// delta_p = ln(mid of first quote strictly after the trade) - ln(prevailing
// mid). Trades with no later quote are dropped and counted.
ImpactResult compute_impacts(std::span<const ClassifiedTrade> trades,
                             std::span<const QuoteEvent> quotes, std::string_view stock_id);

// Sets omega = raw_volume / mean(volumes[stock_id]) for every observation.
// volumes carries each stock's raw trade volumes over the analysis period.
void normalize_volumes(std::vector<ImpactObservation>& observations,
                       const std::map<std::string, std::vector<double>>& volumes);

struct BinEdges {
    std::vector<double> edges;  // n_bins + 1 values, strictly increasing

    static BinEdges log_spaced(double lo, double hi, std::size_t n_bins);
    static BinEdges standard();  // 20 bins over [10^-3.2, 10]

    std::size_t n_bins() const { return edges.empty() ? 0 : edges.size() - 1; }
    // Half-open bins [lo, hi); the last bin also includes its upper edge.
    std::optional<std::size_t> index_of(double v) const;
};

struct BinPoint {
    double bin_lo = 0.0;
    double bin_hi = 0.0;
    double omega_star = 0.0;    // mean omega over the bin
    double delta_p_star = 0.0;  // mean signed delta_p over the bin
    std::int64_t count = 0;
};

struct BinnedCurve {
    std::string group_id;
    Direction direction = Direction::Indeterminate;
    std::vector<BinPoint> points;  // nonempty bins only, ascending
    std::int64_t out_of_range = 0;
};

// Bins observations of the given direction; empty bins are omitted.
BinnedCurve bin_curve(std::span<const ImpactObservation> observations, const BinEdges& edges,
                      Direction direction, std::string group_id = {});

struct DailyAverage {
    std::string stock_id;
    std::int64_t day = 0;
    Direction direction = Direction::Indeterminate;
    double mean_volume = 0.0;  // raw shares
    double mean_impact = 0.0;  // signed delta_p
    double mean_price = 0.0;
    std::int64_t n_trades = 0;
};

// One record per (stock, day, direction) with at least one observation.
std::vector<DailyAverage> daily_averages(std::span<const ImpactObservation> observations);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t count = 0;
    double mass = 0.0;
};

struct Histogram {
    std::vector<HistogramBin> bins;
    std::int64_t total = 0;                // values counted into bins
    std::int64_t skipped_nonpositive = 0;  // values a log axis cannot hold
};

// n_bins equal-width bins on the log10 axis spanning the positive values;
// masses sum to 1 whenever any value lands in a bin.
Histogram histogram_log(std::span<const double> values, std::size_t n_bins);

struct DailyDistributions {
    std::vector<DailyAverage> averages;
    Histogram volume_hist;
    Histogram impact_hist;  // over |mean_impact|
    Histogram price_hist;
};

// Histograms of the pooled daily averages using n_days equally spaced
// log-axis bins (one bin per trading day in the period).
DailyDistributions daily_distributions(std::span<const ImpactObservation> observations,
                                       std::size_t n_days);

// Least-squares slope of log10|delta_p_star| vs log10(omega_star) over bins
// with omega_star > omega_threshold.
double loglog_slope(const BinnedCurve& curve, double omega_threshold);

}  // namespace tickimpact
