#include "tickimpact/collapse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "tickimpact/errors.hpp"

namespace tickimpact {

LiquidityProxy liquidity_proxy(std::span<const ClassifiedTrade> trades, std::int64_t n_days,
                               std::string group_id) {
    if (n_days < 1) throw ConfigError("liquidity proxy requires n_days >= 1");
    if (trades.empty())
        throw InsufficientDataError("liquidity proxy requires at least one trade");
    double value = 0.0;
    for (const auto& t : trades) value += t.trade.vwap * double(t.trade.total_volume);
    return {std::move(group_id), value / double(n_days)};
}

std::vector<RescaledPoint> rescale(const BinnedCurve& curve, double C, double gamma,
                                   double delta) {
    if (!(C > 0.0)) throw ConfigError("rescale requires C > 0");
    double x_scale = std::pow(C, -delta);
    double y_scale = std::pow(C, gamma);
    std::vector<RescaledPoint> out;
    out.reserve(curve.points.size());
    for (const auto& p : curve.points)
        out.push_back({p.omega_star * x_scale, p.delta_p_star * y_scale, p.count});
    return out;
}

namespace {

// Pooled rescaled points with y as magnitude, sorted by (x, y) so the
// accumulation order is independent of curve and point ordering.
std::vector<std::pair<double, double>> pooled_points(std::span<const BinnedCurve> curves,
                                                     std::span<const LiquidityProxy> proxies,
                                                     double gamma, double delta) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        double x_scale = std::pow(proxies[c].C, -delta);
        double y_scale = std::pow(proxies[c].C, gamma);
        for (const auto& p : curves[c].points)
            pts.emplace_back(p.omega_star * x_scale, std::fabs(p.delta_p_star) * y_scale);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

CollapseEval eval_binned(const std::vector<std::pair<double, double>>& pts,
                         std::size_t n_bins) {
    double x_lo = pts.front().first, x_hi = pts.back().first;

    // Assign each point to a log-spaced bin over [x_lo, x_hi]; a zero-width
    // range degenerates to a single bin holding everything.
    std::vector<std::size_t> bin_of(pts.size(), 0);
    std::size_t eff_bins = 1;
    if (x_hi > x_lo) {
        BinEdges edges = BinEdges::log_spaced(x_lo, x_hi, n_bins);
        eff_bins = n_bins;
        for (std::size_t i = 0; i < pts.size(); ++i)
            bin_of[i] = *edges.index_of(pts[i].first);  // in range by construction
    }

    CollapseEval out;
    double total = 0.0;
    std::size_t i = 0;
    std::size_t nonempty = 0;
    while (i < pts.size()) {
        std::size_t b = bin_of[i];
        std::size_t j = i;
        while (j < pts.size() && bin_of[j] == b) ++j;  // sorted x => bins contiguous
        ++nonempty;
        std::size_t m = j - i;
        if (m >= 2) {
            double mx = 0.0, my = 0.0;
            for (std::size_t k = i; k < j; ++k) {
                mx += pts[k].first;
                my += pts[k].second;
            }
            mx /= double(m);
            my /= double(m);
            if (mx != 0.0 && my != 0.0) {
                double vx = 0.0, vy = 0.0;
                for (std::size_t k = i; k < j; ++k) {
                    vx += (pts[k].first - mx) * (pts[k].first - mx);
                    vy += (pts[k].second - my) * (pts[k].second - my);
                }
                vx /= double(m);
                vy /= double(m);
                total += vx / (mx * mx) + vy / (my * my);
                ++out.used_bins;
            } else {
                ++out.skipped_bins;
            }
        } else {
            ++out.skipped_bins;
        }
        i = j;
    }
    out.skipped_bins += std::int64_t(eff_bins - nonempty);  // empty bins
    if (out.used_bins == 0)
        throw UndefinedObjectiveError("no bin has >= 2 points with nonzero means");
    out.epsilon = total / double(out.used_bins);
    return out;
}

}  // namespace

CollapseEval collapse_error(std::span<const BinnedCurve> curves,
                            std::span<const LiquidityProxy> proxies, double gamma, double delta,
                            std::size_t n_bins) {
    if (curves.size() < 2) throw ConfigError("collapse needs at least 2 curves");
    if (curves.size() != proxies.size())
        throw ConfigError("each curve needs a matching liquidity proxy");
    if (n_bins == 0) throw ConfigError("collapse needs n_bins >= 1");
    for (const auto& p : proxies)
        if (!(p.C > 0.0)) throw ConfigError("liquidity proxies must be positive");

    auto pts = pooled_points(curves, proxies, gamma, delta);
    if (pts.empty()) throw InsufficientDataError("no curve points to collapse");
    return eval_binned(pts, n_bins);
}

BinnedCurve filter_curve(const BinnedCurve& curve, double omega_threshold) {
    BinnedCurve out;
    out.group_id = curve.group_id;
    out.direction = curve.direction;
    out.out_of_range = curve.out_of_range;
    for (const auto& p : curve.points)
        if (p.omega_star > omega_threshold) out.points.push_back(p);
    return out;
}

namespace {

struct Objective {
    std::span<const BinnedCurve> curves;
    std::span<const LiquidityProxy> proxies;
    std::size_t n_bins;
    double lo, hi;

    double operator()(double gamma, double delta) const {
        if (gamma < lo || gamma > hi || delta < lo || delta > hi)
            return std::numeric_limits<double>::infinity();
        try {
            return collapse_error(curves, proxies, gamma, delta, n_bins).epsilon;
        } catch (const UndefinedObjectiveError&) {
            return std::numeric_limits<double>::infinity();
        }
    }
};

struct Vertex {
    double g = 0.0, d = 0.0, f = 0.0;
};

// Nelder-Mead on (gamma, delta); deterministic, bounded via the objective.
Vertex nelder_mead(const Objective& obj, double g0, double d0, double step, double tol,
                   std::size_t max_iter) {
    std::array<Vertex, 3> v{Vertex{g0, d0, obj(g0, d0)},
                            Vertex{g0 + step, d0, obj(g0 + step, d0)},
                            Vertex{g0, d0 + step, obj(g0, d0 + step)}};
    auto order = [&] {
        std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) {
            if (a.f != b.f) return a.f < b.f;
            if (std::fabs(a.g) != std::fabs(b.g)) return std::fabs(a.g) < std::fabs(b.g);
            return std::fabs(a.d) < std::fabs(b.d);
        });
    };
    order();
    for (std::size_t it = 0; it < max_iter; ++it) {
        if (std::isfinite(v[2].f) && v[2].f - v[0].f < tol) break;
        double cg = 0.5 * (v[0].g + v[1].g), cd = 0.5 * (v[0].d + v[1].d);
        Vertex refl{cg + (cg - v[2].g), cd + (cd - v[2].d), 0.0};
        refl.f = obj(refl.g, refl.d);
        if (refl.f < v[0].f) {
            Vertex exp_{cg + 2.0 * (cg - v[2].g), cd + 2.0 * (cd - v[2].d), 0.0};
            exp_.f = obj(exp_.g, exp_.d);
            v[2] = exp_.f < refl.f ? exp_ : refl;
        } else if (refl.f < v[1].f) {
            v[2] = refl;
        } else {
            const Vertex& base = refl.f < v[2].f ? refl : v[2];
            Vertex contr{cg + 0.5 * (base.g - cg), cd + 0.5 * (base.d - cd), 0.0};
            contr.f = obj(contr.g, contr.d);
            if (contr.f < base.f) {
                v[2] = contr;
            } else {  // shrink toward the best vertex
                for (int k = 1; k < 3; ++k) {
                    v[k].g = v[0].g + 0.5 * (v[k].g - v[0].g);
                    v[k].d = v[0].d + 0.5 * (v[k].d - v[0].d);
                    v[k].f = obj(v[k].g, v[k].d);
                }
            }
        }
        order();
    }
    return v[0];
}

}  // namespace

CollapseResult fit_collapse(std::span<const BinnedCurve> curves,
                            std::span<const LiquidityProxy> proxies,
                            const CollapseConfig& config) {
    if (curves.size() < 2) throw ConfigError("collapse needs at least 2 curves");
    if (curves.size() != proxies.size())
        throw ConfigError("each curve needs a matching liquidity proxy");
    if (!(config.grid_step > 0.0) || !(config.grid_hi > config.grid_lo))
        throw ConfigError("collapse grid bounds/step invalid");

    CollapseResult out;
    out.n_bins = config.n_bins;
    out.config = config;

    bool all_equal = true;
    for (const auto& p : proxies)
        if (p.C != proxies[0].C) all_equal = false;

    double best_g = 0.0, best_d = 0.0;
    if (all_equal) {
        // A common C rescales every pooled coordinate by one factor, so the
        // coefficient-of-variation objective cannot see gamma or delta.
        out.identifiable = false;
    } else {
        Objective obj{curves, proxies, config.n_bins, config.grid_lo, config.grid_hi};
        auto steps = std::size_t(
            std::llround((config.grid_hi - config.grid_lo) / config.grid_step));
        double best_f = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i <= steps; ++i) {
            double g = config.grid_lo + double(i) * config.grid_step;
            for (std::size_t j = 0; j <= steps; ++j) {
                double d = config.grid_lo + double(j) * config.grid_step;
                double f = obj(g, d);
                bool better =
                    f < best_f ||
                    (f == best_f && (std::fabs(g) < std::fabs(best_g) ||
                                     (std::fabs(g) == std::fabs(best_g) &&
                                      std::fabs(d) < std::fabs(best_d))));
                if (better) {
                    best_f = f;
                    best_g = g;
                    best_d = d;
                }
            }
        }
        if (!std::isfinite(best_f))
            throw UndefinedObjectiveError("collapse objective undefined on the whole grid");
        Vertex refined = nelder_mead(obj, best_g, best_d, config.grid_step, config.refine_tol,
                                     config.max_refine_iter);
        if (refined.f < best_f) {
            best_g = refined.g;
            best_d = refined.d;
        }
    }

    out.gamma = best_g;
    out.delta = best_d;
    CollapseEval eval = collapse_error(curves, proxies, best_g, best_d, config.n_bins);
    out.epsilon = eval.epsilon;
    out.used_bins = eval.used_bins;
    out.skipped_bins = eval.skipped_bins;
    for (std::size_t c = 0; c < curves.size(); ++c)
        out.rescaled_curves.push_back(
            {curves[c].group_id, proxies[c].C, rescale(curves[c], proxies[c].C, best_g, best_d)});
    return out;
}

}  // namespace tickimpact
