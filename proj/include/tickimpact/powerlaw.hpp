#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tickimpact/impact.hpp"

namespace tickimpact {

struct PowerLawConfig {
    std::size_t min_tail = 5;          // smallest tail the x_min scan may leave
    std::size_t max_candidates = 1000; // cap on x_min candidates (log-spaced ranks when over)
    std::int64_t n_boot = 2500;        // bootstrap replicates; 0 skips the p-value
    std::uint64_t seed = 0;
    unsigned threads = 1;              // 0 = hardware concurrency
    std::size_t low_power_threshold = 50;
};

struct PowerLawFit {
    double alpha = 0.0;
    double x_min = 0.0;
    double ks = 0.0;  // KS distance of the fitted tail
    std::optional<double> p_value;
    std::int64_t n_tail = 0;
    std::int64_t n_boot = 0;
    std::uint64_t seed = 0;
    std::int64_t candidate_count = 0;  // x_min candidates actually scanned
    bool low_power = false;            // n_tail below low_power_threshold
    bool degenerate_alpha = false;     // tail has <= 2 distinct values
};

// Continuous MLE over points >= x_min: alpha = 1 + n / sum(ln(x_i/x_min)).
double mle_alpha(std::span<const double> sample, double x_min);

// Two-sided KS distance between the tail (points >= x_min) empirical step
// CDF and P(x) = 1 - (x/x_min)^(1-alpha).
double ks_distance(std::span<const double> sample, double alpha, double x_min);

// Scans x_min candidates over distinct sample values, fitting alpha by MLE
// at each and keeping the candidate with the smallest KS distance (ties go
// to the smaller x_min). No p-value is computed here.
PowerLawFit fit_xmin(std::span<const double> sample, const PowerLawConfig& config = {});

// Semiparametric bootstrap p-value: replicates resample the body below
// x_min and draw the tail from the fitted power law, are refit with
// fit_xmin, and p = fraction of replicate KS distances above the observed.
double gof_pvalue(std::span<const double> sample, const PowerLawFit& fit, std::int64_t n_boot,
                  std::uint64_t seed, const PowerLawConfig& config = {});

// Fits the |delta_p_star| values of bins with omega_star > volume_threshold,
// then bootstraps the p-value when config.n_boot > 0.
PowerLawFit fit_tail_impacts(const BinnedCurve& curve, double volume_threshold,
                             const PowerLawConfig& config = {});

}  // namespace tickimpact
