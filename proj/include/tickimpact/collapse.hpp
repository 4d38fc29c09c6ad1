#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tickimpact/impact.hpp"

namespace tickimpact {

struct LiquidityProxy {
    std::string group_id;
    double C = 0.0;  // average daily value traded
};

// C = sum(vwap * volume) / n_days over the group's classified trades.
LiquidityProxy liquidity_proxy(std::span<const ClassifiedTrade> trades, std::int64_t n_days,
                               std::string group_id = {});

struct RescaledPoint {
    double x = 0.0;  // omega_star / C^delta
    double y = 0.0;  // delta_p_star * C^gamma, sign preserved
    std::int64_t count = 0;
};

std::vector<RescaledPoint> rescale(const BinnedCurve& curve, double C, double gamma,
                                   double delta);

struct CollapseEval {
    double epsilon = 0.0;
    std::int64_t used_bins = 0;
    std::int64_t skipped_bins = 0;  // bins with < 2 points or a zero mean
};

// Average over log-spaced x-bins of (cv_x)^2 + (cv_y)^2 of the pooled
// rescaled points, with y taken as |delta_p_star * C^gamma|. The bin
// partition spans the pooled rescaled-x range and moves with (gamma, delta).
CollapseEval collapse_error(std::span<const BinnedCurve> curves,
                            std::span<const LiquidityProxy> proxies, double gamma, double delta,
                            std::size_t n_bins);

struct CollapseConfig {
    std::size_t n_bins = 10;
    double grid_lo = -1.0;
    double grid_hi = 1.0;
    double grid_step = 0.01;
    double refine_tol = 1e-6;  // simplex stops when epsilon spread is below this
    std::size_t max_refine_iter = 200;
};

struct GroupRescaled {
    std::string group_id;
    double C = 0.0;
    std::vector<RescaledPoint> points;
};

struct CollapseResult {
    double gamma = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    std::size_t n_bins = 0;
    std::int64_t used_bins = 0;
    std::int64_t skipped_bins = 0;
    bool identifiable = true;  // false when all proxies are equal
    std::vector<GroupRescaled> rescaled_curves;
    CollapseConfig config;
};

// Deterministic two-stage search (coarse grid, then Nelder-Mead refinement)
// for the exponents minimizing collapse_error. Grid ties resolve toward the
// smallest (|gamma|, |delta|) lexicographically. When every group has the
// same C the objective is flat in both exponents; the result is flagged
// unidentifiable and pinned to (0, 0).
CollapseResult fit_collapse(std::span<const BinnedCurve> curves,
                            std::span<const LiquidityProxy> proxies,
                            const CollapseConfig& config = {});

// Copy of the curve keeping only points with omega_star > omega_threshold.
BinnedCurve filter_curve(const BinnedCurve& curve, double omega_threshold);

}  // namespace tickimpact
