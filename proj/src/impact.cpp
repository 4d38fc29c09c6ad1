#include "tickimpact/impact.hpp"

#include <algorithm>
#include <cmath>

#include "tickimpact/errors.hpp"
#include "tickimpact/stats.hpp"

namespace tickimpact {

std::map<std::string, std::int64_t> ImpactCounts::as_map() const {
    return {{"input", input},
            {"computed", computed},
            {"dropped_no_after_quote", dropped_no_after_quote}};
}

ImpactResult compute_impacts(std::span<const ClassifiedTrade> trades,
                             std::span<const QuoteEvent> quotes, std::string_view stock_id) {
    ImpactResult out;
    out.counts.input = std::int64_t(trades.size());
    out.observations.reserve(trades.size());

    std::size_t q = 0;  // first quote with timestamp > current trade's
    for (const auto& ct : trades) {
        while (q < quotes.size() && quotes[q].timestamp <= ct.trade.timestamp) ++q;
        if (q == quotes.size()) {
            ++out.counts.dropped_no_after_quote;
            continue;
        }
        ImpactObservation obs;
        obs.stock_id = std::string(stock_id);
        obs.day = day_of(ct.trade.timestamp);
        obs.raw_volume = double(ct.trade.total_volume);
        obs.omega = obs.raw_volume;
        obs.delta_p = std::log(quotes[q].mid()) - std::log(ct.prevailing_mid);
        obs.price = ct.trade.vwap;
        obs.direction = ct.direction;
        out.observations.push_back(std::move(obs));
        ++out.counts.computed;
    }
    return out;
}

void normalize_volumes(std::vector<ImpactObservation>& observations,
                       const std::map<std::string, std::vector<double>>& volumes) {
    std::map<std::string, double> means;
    for (const auto& [stock, vols] : volumes) {
        if (vols.empty()) throw InsufficientDataError("no volumes for stock " + stock);
        means[stock] = mean(vols);
    }
    for (auto& obs : observations) {
        auto it = means.find(obs.stock_id);
        if (it == means.end())
            throw InsufficientDataError("no volumes for stock " + obs.stock_id);
        obs.omega = obs.raw_volume / it->second;
    }
}

BinEdges BinEdges::log_spaced(double lo, double hi, std::size_t n_bins) {
    if (!(lo > 0.0) || !(hi > lo) || n_bins == 0)
        throw ConfigError("bin edges require 0 < lo < hi and n_bins >= 1");
    BinEdges out;
    out.edges.resize(n_bins + 1);
    double la = std::log10(lo), lh = std::log10(hi);
    for (std::size_t i = 1; i < n_bins; ++i)
        out.edges[i] = std::pow(10.0, la + (lh - la) * double(i) / double(n_bins));
    out.edges.front() = lo;  // endpoints exact, not round-tripped through log10
    out.edges.back() = hi;
    for (std::size_t i = 0; i < n_bins; ++i)
        if (!(out.edges[i] < out.edges[i + 1]))
            throw ConfigError("bin edges not strictly increasing");
    return out;
}

BinEdges BinEdges::standard() { return log_spaced(std::pow(10.0, -3.2), 10.0, 20); }

std::optional<std::size_t> BinEdges::index_of(double v) const {
    if (edges.size() < 2 || v < edges.front() || v > edges.back()) return std::nullopt;
    if (v == edges.back()) return edges.size() - 2;
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return std::size_t(it - edges.begin()) - 1;
}

BinnedCurve bin_curve(std::span<const ImpactObservation> observations, const BinEdges& edges,
                      Direction direction, std::string group_id) {
    BinnedCurve out;
    out.group_id = std::move(group_id);
    out.direction = direction;

    std::size_t n = edges.n_bins();
    std::vector<double> sum_omega(n, 0.0), sum_dp(n, 0.0);
    std::vector<std::int64_t> count(n, 0);
    for (const auto& obs : observations) {
        if (obs.direction != direction) continue;
        auto idx = edges.index_of(obs.omega);
        if (!idx) {
            ++out.out_of_range;
            continue;
        }
        sum_omega[*idx] += obs.omega;
        sum_dp[*idx] += obs.delta_p;
        ++count[*idx];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (count[i] == 0) continue;
        out.points.push_back({edges.edges[i], edges.edges[i + 1], sum_omega[i] / double(count[i]),
                              sum_dp[i] / double(count[i]), count[i]});
    }
    return out;
}

std::vector<DailyAverage> daily_averages(std::span<const ImpactObservation> observations) {
    struct Acc {
        double vol = 0.0, dp = 0.0, price = 0.0;
        std::int64_t n = 0;
    };
    std::map<std::tuple<std::string, std::int64_t, Direction>, Acc> acc;
    for (const auto& obs : observations) {
        auto& a = acc[{obs.stock_id, obs.day, obs.direction}];
        a.vol += obs.raw_volume;
        a.dp += obs.delta_p;
        a.price += obs.price;
        ++a.n;
    }
    std::vector<DailyAverage> out;
    out.reserve(acc.size());
    for (const auto& [key, a] : acc) {
        double n = double(a.n);
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), a.vol / n, a.dp / n,
                       a.price / n, a.n});
    }
    return out;
}

Histogram histogram_log(std::span<const double> values, std::size_t n_bins) {
    if (n_bins == 0) throw ConfigError("histogram requires n_bins >= 1");
    Histogram out;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (double v : values) {
        if (!(v > 0.0)) {
            ++out.skipped_nonpositive;
            continue;
        }
        double lv = std::log10(v);
        if (!any) {
            lo = hi = lv;
            any = true;
        } else {
            lo = std::min(lo, lv);
            hi = std::max(hi, lv);
        }
    }
    if (!any) return out;
    if (lo == hi) {  // a single distinct value still gets a well-formed axis
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<std::int64_t> count(n_bins, 0);
    double width = (hi - lo) / double(n_bins);
    for (double v : values) {
        if (!(v > 0.0)) continue;
        double lv = std::log10(v);
        std::size_t idx = lv >= hi ? n_bins - 1
                                   : std::size_t(std::max(0.0, std::floor((lv - lo) / width)));
        if (idx >= n_bins) idx = n_bins - 1;
        ++count[idx];
        ++out.total;
    }
    out.bins.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        out.bins[i].lo = std::pow(10.0, lo + width * double(i));
        out.bins[i].hi = std::pow(10.0, lo + width * double(i + 1));
        out.bins[i].count = count[i];
        out.bins[i].mass = double(count[i]) / double(out.total);
    }
    return out;
}

DailyDistributions daily_distributions(std::span<const ImpactObservation> observations,
                                       std::size_t n_days) {
    DailyDistributions out;
    out.averages = daily_averages(observations);
    std::vector<double> vols, impacts, prices;
    vols.reserve(out.averages.size());
    impacts.reserve(out.averages.size());
    prices.reserve(out.averages.size());
    for (const auto& d : out.averages) {
        vols.push_back(d.mean_volume);
        impacts.push_back(std::fabs(d.mean_impact));
        prices.push_back(d.mean_price);
    }
    out.volume_hist = histogram_log(vols, n_days);
    out.impact_hist = histogram_log(impacts, n_days);
    out.price_hist = histogram_log(prices, n_days);
    return out;
}

double loglog_slope(const BinnedCurve& curve, double omega_threshold) {
    std::vector<double> x, y;
    for (const auto& p : curve.points) {
        if (!(p.omega_star > omega_threshold)) continue;
        double mag = std::fabs(p.delta_p_star);
        if (!(mag > 0.0)) continue;
        x.push_back(std::log10(p.omega_star));
        y.push_back(std::log10(mag));
    }
    if (x.size() < 2)
        throw InsufficientDataError("log-log slope needs >= 2 bins above threshold");
    return least_squares(x, y).slope;
}

}  // namespace tickimpact
