#include "tickimpact/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "tickimpact/errors.hpp"
#include "tickimpact/rng.hpp"

namespace tickimpact {

namespace {

struct SortedSample {
    std::vector<double> x;       // ascending
    std::vector<double> lx;      // ln(x[i])
    std::vector<double> suffix;  // suffix[i] = sum of lx[i..n)
};

SortedSample prepare(std::span<const double> sample) {
    SortedSample s;
    s.x.assign(sample.begin(), sample.end());
    std::sort(s.x.begin(), s.x.end());
    if (!s.x.empty() && !(s.x.front() > 0.0))
        throw DegenerateSampleError("power-law sample values must be positive");
    std::size_t n = s.x.size();
    s.lx.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.lx[i] = std::log(s.x[i]);
    s.suffix.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) s.suffix[i] = s.suffix[i + 1] + s.lx[i];
    return s;
}

// KS distance of the tail starting at index i0 against the fitted CDF,
// using the two-sided step convention (pre- and post-jump empirical values).
double ks_at(const SortedSample& s, std::size_t i0, double alpha) {
    std::size_t n = s.x.size();
    double nt = double(n - i0);
    double lv = s.lx[i0];
    double one_minus_alpha = 1.0 - alpha;
    double d = 0.0;
    for (std::size_t j = i0; j < n; ++j) {
        double p = 1.0 - std::exp(one_minus_alpha * (s.lx[j] - lv));
        double hi = double(j - i0 + 1) / nt;
        double lo = double(j - i0) / nt;
        d = std::max(d, std::max(std::fabs(hi - p), std::fabs(lo - p)));
    }
    return d;
}

// Start indices of distinct values, optionally thinned to at most
// max_candidates log-spaced ranks. Rank-based thinning keeps the candidate
// set a function of sort order only, so it scales exactly with the sample.
std::vector<std::size_t> candidate_starts(const SortedSample& s, std::size_t max_candidates) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
        if (i == 0 || s.x[i] != s.x[i - 1]) starts.push_back(i);
    if (starts.size() <= max_candidates || max_candidates == 0) return starts;

    std::vector<std::size_t> picked;
    picked.reserve(max_candidates);
    double m = double(starts.size());
    for (std::size_t k = 0; k < max_candidates; ++k) {
        double t = max_candidates == 1 ? 0.0 : double(k) / double(max_candidates - 1);
        auto rank = std::size_t(std::llround(std::pow(m, t)));  // in [1, m]
        rank = std::min(std::max<std::size_t>(rank, 1), starts.size());
        std::size_t idx = starts[rank - 1];
        if (picked.empty() || picked.back() != idx) picked.push_back(idx);
    }
    return picked;
}

}  // namespace

double mle_alpha(std::span<const double> sample, double x_min) {
    if (!(x_min > 0.0)) throw ConfigError("x_min must be positive");
    std::size_t n_tail = 0;
    double sum_ln = 0.0;
    for (double x : sample) {
        if (x < x_min) continue;
        sum_ln += std::log(x / x_min);
        ++n_tail;
    }
    if (n_tail < 2) throw InsufficientDataError("MLE needs at least 2 tail points");
    if (!(sum_ln > 0.0)) throw DegenerateSampleError("all tail points equal x_min");
    return 1.0 + double(n_tail) / sum_ln;
}

double ks_distance(std::span<const double> sample, double alpha, double x_min) {
    if (!(alpha > 1.0)) throw ConfigError("alpha must exceed 1");
    if (!(x_min > 0.0)) throw ConfigError("x_min must be positive");
    std::vector<double> tail;
    for (double x : sample)
        if (x >= x_min) tail.push_back(x);
    if (tail.empty()) throw InsufficientDataError("empty tail for KS distance");
    std::sort(tail.begin(), tail.end());
    double nt = double(tail.size());
    double d = 0.0;
    for (std::size_t j = 0; j < tail.size(); ++j) {
        double p = 1.0 - std::pow(tail[j] / x_min, 1.0 - alpha);
        double hi = double(j + 1) / nt;
        double lo = double(j) / nt;
        d = std::max(d, std::max(std::fabs(hi - p), std::fabs(lo - p)));
    }
    return d;
}

PowerLawFit fit_xmin(std::span<const double> sample, const PowerLawConfig& config) {
    std::size_t min_tail = std::max<std::size_t>(config.min_tail, 2);
    if (sample.size() < min_tail)
        throw InsufficientDataError("sample smaller than the minimum tail size");

    SortedSample s = prepare(sample);
    std::vector<std::size_t> all_starts;
    for (std::size_t i = 0; i < s.x.size(); ++i)
        if (i == 0 || s.x[i] != s.x[i - 1]) all_starts.push_back(i);
    std::vector<std::size_t> starts = candidate_starts(s, config.max_candidates);

    std::size_t n = s.x.size();
    PowerLawFit best;
    best.ks = std::numeric_limits<double>::infinity();
    std::int64_t evaluated = 0;
    std::size_t best_i0 = 0;
    for (std::size_t i0 : starts) {
        std::size_t nt = n - i0;
        if (nt < min_tail) break;  // candidates ascend, so tails only shrink
        double sum_ln = s.suffix[i0] - double(nt) * s.lx[i0];
        if (!(sum_ln > 0.0)) continue;  // whole tail equals the candidate
        double alpha = 1.0 + double(nt) / sum_ln;
        double d = ks_at(s, i0, alpha);
        ++evaluated;
        if (d < best.ks) {  // strict: ties keep the earlier (smaller) x_min
            best.alpha = alpha;
            best.x_min = s.x[i0];
            best.ks = d;
            best.n_tail = std::int64_t(nt);
            best_i0 = i0;
        }
    }
    if (evaluated == 0)
        throw InsufficientDataError("no x_min candidate leaves a usable tail");

    best.candidate_count = evaluated;
    best.seed = config.seed;
    best.low_power = std::size_t(best.n_tail) < config.low_power_threshold;
    auto first = std::lower_bound(all_starts.begin(), all_starts.end(), best_i0);
    best.degenerate_alpha = (all_starts.end() - first) <= 2;
    return best;
}

double gof_pvalue(std::span<const double> sample, const PowerLawFit& fit, std::int64_t n_boot,
                  std::uint64_t seed, const PowerLawConfig& config) {
    if (n_boot <= 0) throw ConfigError("gof_pvalue requires n_boot >= 1");
    std::size_t n = sample.size();
    std::vector<double> body;
    std::size_t n_tail = 0;
    for (double x : sample) {
        if (x >= fit.x_min)
            ++n_tail;
        else
            body.push_back(x);
    }
    std::sort(body.begin(), body.end());
    double p_tail = double(n_tail) / double(n);
    double expo = -1.0 / (fit.alpha - 1.0);

    std::vector<double> ds(static_cast<std::size_t>(n_boot), 0.0);
    auto run_range = [&](std::size_t b_lo, std::size_t b_hi) {
        std::vector<double> rep(n);
        for (std::size_t b = b_lo; b < b_hi; ++b) {
            Rng rng(mix_seed(seed, b));
            for (std::size_t i = 0; i < n; ++i) {
                if (body.empty() || rng.uniform() < p_tail) {
                    double u = rng.uniform();
                    rep[i] = fit.x_min * std::pow(1.0 - u, expo);
                } else {
                    rep[i] = body[rng.index(body.size())];
                }
            }
            try {
                ds[b] = fit_xmin(rep, config).ks;
            } catch (const Error&) {
                ds[b] = std::numeric_limits<double>::infinity();
            }
        }
    };

    unsigned threads = config.threads == 0
                           ? std::max(1u, std::thread::hardware_concurrency())
                           : config.threads;
    threads = std::min<unsigned>(threads, unsigned(n_boot));
    if (threads <= 1) {
        run_range(0, std::size_t(n_boot));
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (std::size_t(n_boot) + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t lo = t * chunk, hi = std::min(std::size_t(n_boot), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    std::int64_t exceed = 0;
    for (double d : ds)
        if (d > fit.ks) ++exceed;
    return double(exceed) / double(n_boot);
}

PowerLawFit fit_tail_impacts(const BinnedCurve& curve, double volume_threshold,
                             const PowerLawConfig& config) {
    std::vector<double> values;
    for (const auto& p : curve.points) {
        if (!(p.omega_star > volume_threshold)) continue;
        double mag = std::fabs(p.delta_p_star);
        if (mag > 0.0) values.push_back(mag);
    }
    if (values.size() < std::max<std::size_t>(config.min_tail, 2))
        throw InsufficientDataError("too few bins above the volume threshold to fit");

    PowerLawFit fit = fit_xmin(values, config);
    fit.n_boot = config.n_boot;
    fit.seed = config.seed;
    if (config.n_boot > 0)
        fit.p_value = gof_pvalue(values, fit, config.n_boot, config.seed, config);
    return fit;
}

}  // namespace tickimpact
