#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tickimpact/collapse.hpp"
#include "tickimpact/events.hpp"
#include "tickimpact/impact.hpp"

namespace tickimpact {

// Inverse-CDF draws from p(x) ~ x^-alpha above x_min: x = x_min*(1-u)^(-1/(alpha-1)).
std::vector<double> gen_powerlaw_samples(double alpha, double x_min, std::size_t n,
                                         std::uint64_t seed);

struct GroupSpec {
    std::string group_id;
    std::vector<std::string> stock_ids;  // empty = one stock named after the group
    double c_target = 0.0;      // > 0 rescales mid0 so expected daily value traded matches
    double alpha_impact = 0.3;  // price-response exponent (Delta p = sign * |omega|^alpha / lambda)
    double lambda = 1000.0;     // inverse impact scale
    double trade_rate = 360.0;  // trades per hour of tradable session
    double mean_volume = 1000.0;  // shares
    double volume_sigma = 1.0;    // lognormal sigma of volumes; 0 = constant volume
    double spread = 0.10;         // quoted spread, price units
    double mid0 = 100.0;          // opening midquote
    double mid_volatility = 0.0;  // per-trade diffusion of the log-midquote
    double noise_sigma = 0.0;     // mean-one lognormal noise on impact magnitudes
    double midquote_fraction = 0.0;  // fraction of trades priced at the mid (tick-rule food)
    double buy_probability = 0.5;
    Micros quote_gap = 1000;  // pre/post quote offset around each trade, microseconds
};

struct MarketScenario {
    std::vector<GroupSpec> groups;
    SessionFilter session;
    std::int64_t n_days = 1;
    std::int32_t first_day = 15707;  // days since epoch; 2013-01-02
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError
};

struct LabeledTape {
    std::string stock_id;
    std::string group_id;
    std::vector<TradeEvent> trades;
    std::vector<QuoteEvent> quotes;
    std::vector<Direction> true_directions;  // one per trade
    std::vector<double> true_impacts;        // signed log-mid change per trade
};

// One tape per stock; quotes bracket every trade at +-quote_gap and the
// post-trade midquote moves by the configured impact law. Deterministic
// given scenario + seed.
std::vector<LabeledTape> gen_market(const MarketScenario& scenario);

struct CollapseFamilySpec {
    std::vector<double> proxies = {1.0, 10.0, 100.0};
    double gamma0 = 0.3;
    double delta0 = 0.3;
    double beta = 1.0;   // master curve f(z) = z^beta ...
    double z0 = 0.0;     // ... / (1 + z/z0)^kappa when z0 > 0
    double kappa = 0.0;
    std::size_t n_points = 20;
    double z_lo = 0.13;  // master-grid span (rescaled volume units)
    double z_hi = 2.5;
    double noise_sigma = 0.0;  // mean-one lognormal noise on the y values
    std::uint64_t seed = 1;
};

struct CollapseFamily {
    std::vector<BinnedCurve> curves;
    std::vector<LiquidityProxy> proxies;
};

// Analytic curve family satisfying delta_p_star = C^-gamma0 * f(omega_star / C^delta0):
// group j gets support omega = z * C_j^delta0 over a shared master grid z, so
// each curve is the master curve with both axes scaled by its proxy.
CollapseFamily gen_collapse_family(const CollapseFamilySpec& spec);

// Writes trades as "timestamp,price,volume" and quotes as
// "timestamp,bid,ask" (ISO timestamps, one header row, %.17g floats — the
// ingest format with skip_rows = 1). Labels go to a sidecar
// "timestamp,direction,true_impact" when labels_path is nonempty.
void write_tape(const LabeledTape& tape, const std::filesystem::path& trades_path,
                const std::filesystem::path& quotes_path,
                const std::filesystem::path& labels_path = {});

}  // namespace tickimpact
