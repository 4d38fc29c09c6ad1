#include "tickimpact/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tickimpact/errors.hpp"
#include "tickimpact/rng.hpp"
#include "tickimpact/time.hpp"

namespace tickimpact {

std::vector<double> gen_powerlaw_samples(double alpha, double x_min, std::size_t n,
                                         std::uint64_t seed) {
    if (!(alpha > 1.0)) throw ConfigError("power-law generator requires alpha > 1");
    if (!(x_min > 0.0)) throw ConfigError("power-law generator requires x_min > 0");
    Rng rng(seed);
    double expo = -1.0 / (alpha - 1.0);
    std::vector<double> out(n);
    for (auto& x : out) x = x_min * std::pow(1.0 - rng.uniform(), expo);
    return out;
}

namespace {

// Tradable time-of-day intervals: [day_start, day_end) minus every
// excluded/auction window.
std::vector<TimeWindow> allowed_intervals(const SessionFilter& session) {
    std::vector<TimeWindow> cuts = session.excluded_windows;
    cuts.insert(cuts.end(), session.auction_windows.begin(), session.auction_windows.end());
    std::sort(cuts.begin(), cuts.end(),
              [](const TimeWindow& a, const TimeWindow& b) { return a.begin < b.begin; });
    std::vector<TimeWindow> out;
    Micros cursor = session.day_start;
    for (const auto& w : cuts) {
        Micros b = std::max(w.begin, session.day_start);
        Micros e = std::min(w.end, session.day_end);
        if (e <= b) continue;
        if (b > cursor) out.push_back({cursor, b});
        cursor = std::max(cursor, e);
    }
    if (cursor < session.day_end) out.push_back({cursor, session.day_end});
    return out;
}

}  // namespace

void MarketScenario::validate() const {
    session.validate();
    if (groups.empty()) throw ConfigError("scenario has no groups");
    if (n_days < 1) throw ConfigError("scenario requires n_days >= 1");
    if (allowed_intervals(session).empty())
        throw ConfigError("session leaves no tradable time");
    for (const auto& g : groups) {
        if (g.group_id.empty()) throw ConfigError("group without an id");
        if (!(g.trade_rate > 0.0)) throw ConfigError(g.group_id + ": trade_rate must be > 0");
        if (!(g.mean_volume >= 1.0))
            throw ConfigError(g.group_id + ": mean_volume must be >= 1");
        if (!(g.lambda > 0.0)) throw ConfigError(g.group_id + ": lambda must be > 0");
        if (!(g.alpha_impact > 0.0))
            throw ConfigError(g.group_id + ": alpha_impact must be > 0");
        if (!(g.spread > 0.0)) throw ConfigError(g.group_id + ": spread must be > 0");
        if (!(g.mid0 > 0.0)) throw ConfigError(g.group_id + ": mid0 must be > 0");
        if (g.quote_gap < 1) throw ConfigError(g.group_id + ": quote_gap must be >= 1");
        if (g.buy_probability < 0.0 || g.buy_probability > 1.0)
            throw ConfigError(g.group_id + ": buy_probability outside [0, 1]");
        if (g.midquote_fraction < 0.0 || g.midquote_fraction > 1.0)
            throw ConfigError(g.group_id + ": midquote_fraction outside [0, 1]");
    }
}

std::vector<LabeledTape> gen_market(const MarketScenario& scenario) {
    scenario.validate();
    auto intervals = allowed_intervals(scenario.session);
    double tradable_hours = 0.0;
    for (const auto& w : intervals)
        tradable_hours += double(w.end - w.begin) / double(kMicrosPerHour);

    std::vector<LabeledTape> tapes;
    for (std::size_t gi = 0; gi < scenario.groups.size(); ++gi) {
        const GroupSpec& g = scenario.groups[gi];
        std::vector<std::string> stocks =
            g.stock_ids.empty() ? std::vector<std::string>{g.group_id} : g.stock_ids;

        double mid0 = g.mid0;
        if (g.c_target > 0.0) {
            double trades_per_day = g.trade_rate * tradable_hours;
            mid0 = g.c_target / (trades_per_day * g.mean_volume * double(stocks.size()));
        }

        for (std::size_t si = 0; si < stocks.size(); ++si) {
            Rng rng(mix_seed(mix_seed(scenario.seed, gi), si));
            LabeledTape tape;
            tape.stock_id = stocks[si];
            tape.group_id = g.group_id;
            double m = std::log(mid0);  // log-midquote state
            double half = 0.5 * g.spread;

            for (std::int64_t d = 0; d < scenario.n_days; ++d) {
                Micros base = Micros(scenario.first_day + d) * kMicrosPerDay;
                for (const auto& w : intervals) {
                    double span = double(w.end - w.begin);
                    auto n = std::int64_t(std::llround(g.trade_rate * span /
                                                       double(kMicrosPerHour)));
                    if (n < 1) continue;
                    double spacing = span / double(n);
                    double jit = std::min(0.4 * spacing,
                                          0.5 * spacing - double(g.quote_gap) - 1.0);
                    if (jit <= 0.0)
                        throw ConfigError(g.group_id +
                                          ": trade_rate too high for quote_gap");
                    for (std::int64_t k = 0; k < n; ++k) {
                        double center = (double(k) + 0.5) * spacing;
                        Micros t = base + w.begin +
                                   Micros(std::llround(center + rng.uniform(-jit, jit)));

                        if (g.mid_volatility > 0.0) m += g.mid_volatility * rng.normal();
                        double mid_before = std::exp(m);
                        tape.quotes.push_back(
                            {t - g.quote_gap, mid_before - half, mid_before + half});

                        std::int64_t vol = std::int64_t(std::llround(g.mean_volume));
                        if (g.volume_sigma > 0.0) {
                            double z = rng.normal();
                            vol = std::int64_t(std::llround(
                                g.mean_volume *
                                std::exp(g.volume_sigma * z -
                                         0.5 * g.volume_sigma * g.volume_sigma)));
                        }
                        vol = std::max<std::int64_t>(vol, 1);
                        double omega = double(vol) / g.mean_volume;

                        bool buyer = rng.uniform() < g.buy_probability;
                        bool at_mid = rng.uniform() < g.midquote_fraction;
                        double price = at_mid ? mid_before
                                              : (buyer ? mid_before + half : mid_before - half);

                        double impact = std::pow(omega, g.alpha_impact) / g.lambda;
                        if (g.noise_sigma > 0.0)
                            impact *= std::exp(g.noise_sigma * rng.normal() -
                                               0.5 * g.noise_sigma * g.noise_sigma);
                        double signed_impact = buyer ? impact : -impact;
                        m += signed_impact;
                        double mid_after = std::exp(m);
                        tape.quotes.push_back(
                            {t + g.quote_gap, mid_after - half, mid_after + half});

                        tape.trades.push_back({t, price, vol});
                        tape.true_directions.push_back(buyer ? Direction::BuyerInitiated
                                                             : Direction::SellerInitiated);
                        tape.true_impacts.push_back(signed_impact);
                    }
                }
            }
            tapes.push_back(std::move(tape));
        }
    }
    return tapes;
}

CollapseFamily gen_collapse_family(const CollapseFamilySpec& spec) {
    if (spec.proxies.size() < 2)
        throw ConfigError("collapse family needs at least 2 proxies");
    for (double c : spec.proxies)
        if (!(c > 0.0)) throw ConfigError("collapse family proxies must be positive");
    if (spec.n_points < 1) throw ConfigError("collapse family needs n_points >= 1");
    if (!(spec.z_lo > 0.0) || !(spec.z_hi > spec.z_lo))
        throw ConfigError("collapse family requires 0 < z_lo < z_hi");

    std::vector<double> z(spec.n_points, spec.z_lo);
    if (spec.n_points > 1) {
        double la = std::log10(spec.z_lo), lh = std::log10(spec.z_hi);
        for (std::size_t j = 0; j < spec.n_points; ++j)
            z[j] = std::pow(10.0, la + (lh - la) * double(j) / double(spec.n_points - 1));
    }

    CollapseFamily out;
    for (std::size_t gi = 0; gi < spec.proxies.size(); ++gi) {
        double C = spec.proxies[gi];
        Rng rng(mix_seed(spec.seed, gi));
        BinnedCurve curve;
        curve.group_id = "G" + std::to_string(gi + 1);
        curve.direction = Direction::BuyerInitiated;
        double x_scale = std::pow(C, spec.delta0);
        double y_scale = std::pow(C, -spec.gamma0);
        for (std::size_t j = 0; j < spec.n_points; ++j) {
            double f = std::pow(z[j], spec.beta);
            if (spec.z0 > 0.0) f /= std::pow(1.0 + z[j] / spec.z0, spec.kappa);
            double omega = z[j] * x_scale;
            double y = y_scale * f;
            if (spec.noise_sigma > 0.0)
                y *= std::exp(spec.noise_sigma * rng.normal() -
                              0.5 * spec.noise_sigma * spec.noise_sigma);
            curve.points.push_back({omega, omega, omega, y, 1});
        }
        out.proxies.push_back({curve.group_id, C});
        out.curves.push_back(std::move(curve));
    }
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void write_tape(const LabeledTape& tape, const std::filesystem::path& trades_path,
                const std::filesystem::path& quotes_path,
                const std::filesystem::path& labels_path) {
    {
        auto out = open_out(trades_path);
        out << "timestamp,price,volume\n";
        for (const auto& t : tape.trades)
            out << format_iso8601(t.timestamp) << ',' << fmt_double(t.price) << ','
                << t.volume << '\n';
    }
    {
        auto out = open_out(quotes_path);
        out << "timestamp,bid,ask\n";
        for (const auto& q : tape.quotes)
            out << format_iso8601(q.timestamp) << ',' << fmt_double(q.bid) << ','
                << fmt_double(q.ask) << '\n';
    }
    if (!labels_path.empty()) {
        auto out = open_out(labels_path);
        out << "timestamp,direction,true_impact\n";
        for (std::size_t i = 0; i < tape.trades.size(); ++i)
            out << format_iso8601(tape.trades[i].timestamp) << ','
                << to_string(tape.true_directions[i]) << ','
                << fmt_double(tape.true_impacts[i]) << '\n';
    }
}

}  // namespace tickimpact
