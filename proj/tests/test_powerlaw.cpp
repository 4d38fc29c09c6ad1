#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tickimpact/errors.hpp"
#include "tickimpact/powerlaw.hpp"
#include "tickimpact/rng.hpp"
#include "tickimpact/synth.hpp"

using namespace tickimpact;

TEST_CASE("powerlaw: mle closed forms") {
    // four points at x_min * e  =>  sum ln = 4, alpha = 1 + 4/4 = 2
    double e1 = 2.0 * std::exp(1.0);
    std::vector<double> s1 = {e1, e1, e1, e1};
    CHECK(mle_alpha(s1, 2.0) == doctest::Approx(2.0).epsilon(1e-12));

    // four points at x_min * sqrt(e)  =>  alpha = 1 + 4/2 = 3
    double e2 = 2.0 * std::exp(0.5);
    std::vector<double> s2 = {e2, e2, e2, e2};
    CHECK(mle_alpha(s2, 2.0) == doctest::Approx(3.0).epsilon(1e-12));

    // points below x_min do not participate
    std::vector<double> s3 = {0.5, 1.0, e1, e1, e1, e1};
    CHECK(mle_alpha(s3, 2.0) == mle_alpha(s1, 2.0));

    CHECK_THROWS_AS(mle_alpha(s1, 0.0), ConfigError);
    CHECK_THROWS_AS(mle_alpha(s1, -1.0), ConfigError);
    CHECK_THROWS_AS(mle_alpha(std::vector<double>{3.0}, 1.0), InsufficientDataError);
    CHECK_THROWS_AS(mle_alpha(std::vector<double>{0.5, 3.0}, 1.0), InsufficientDataError);
    CHECK_THROWS_AS(mle_alpha(std::vector<double>{2.0, 2.0, 2.0}, 2.0), DegenerateSampleError);
}

TEST_CASE("powerlaw: ks distance step conventions") {
    // a single point sitting at x_min: model CDF 0, empirical jumps 0 -> 1
    CHECK(ks_distance(std::vector<double>{5.0}, 2.5, 5.0) == 1.0);

    // exact quantile sample: both step sides sit 1/(2n) from the model
    std::size_t n = 100;
    double alpha = 2.5;
    std::vector<double> q(n);
    for (std::size_t i = 1; i <= n; ++i)
        q[i - 1] = std::pow(1.0 - (double(i) - 0.5) / double(n), -1.0 / (alpha - 1.0));
    CHECK(ks_distance(q, alpha, 1.0) == doctest::Approx(1.0 / (2.0 * double(n))).epsilon(1e-9));

    std::vector<double> s = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(ks_distance(s, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(ks_distance(s, 0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(ks_distance(s, 2.0, 0.0), ConfigError);
    CHECK_THROWS_AS(ks_distance(s, 2.0, 100.0), InsufficientDataError);
}

TEST_CASE("powerlaw: xmin scan is self-consistent") {
    // body: uniform noise below 0.01; tail: true power law above it
    Rng body_rng(7);
    std::vector<double> sample;
    for (int i = 0; i < 800; ++i) sample.push_back(body_rng.uniform(0.001, 0.01));
    auto tail = gen_powerlaw_samples(2.5, 0.01, 1200, 8);
    sample.insert(sample.end(), tail.begin(), tail.end());

    PowerLawConfig cfg;
    cfg.max_candidates = 0;  // scan every distinct value
    cfg.seed = 77;
    auto fit = fit_xmin(sample, cfg);

    CHECK(fit.alpha > 1.0);
    CHECK(fit.seed == 77);
    CHECK(fit.low_power == false);
    CHECK(fit.degenerate_alpha == false);
    CHECK(!fit.p_value.has_value());
    CHECK(fit.n_boot == 0);
    CHECK(fit.candidate_count > 100);

    // the reported pieces agree with the standalone primitives
    std::int64_t n_tail = std::int64_t(std::count_if(
        sample.begin(), sample.end(), [&](double x) { return x >= fit.x_min; }));
    CHECK(n_tail == fit.n_tail);
    CHECK(mle_alpha(sample, fit.x_min) == doctest::Approx(fit.alpha).epsilon(1e-12));
    CHECK(ks_distance(sample, fit.alpha, fit.x_min) == doctest::Approx(fit.ks).epsilon(1e-12));

    // no probed candidate does better than the reported optimum
    std::vector<double> sorted(sample);
    std::sort(sorted.begin(), sorted.end());
    Rng probe_rng(9);
    for (int k = 0; k < 20; ++k) {
        double v = sorted[probe_rng.index(sorted.size() - 10)];
        double a;
        try {
            a = mle_alpha(sample, v);
        } catch (const Error&) {
            continue;
        }
        CHECK(ks_distance(sample, a, v) >= fit.ks - 1e-12);
    }
}

TEST_CASE("powerlaw: fit is scale equivariant") {
    auto sample = gen_powerlaw_samples(2.2, 0.5, 3000, 19);
    std::vector<double> scaled(sample);
    for (double& x : scaled) x *= 1024.0;  // exact in binary

    auto f1 = fit_xmin(sample);
    auto f2 = fit_xmin(scaled);
    CHECK(f2.x_min == 1024.0 * f1.x_min);
    CHECK(f2.n_tail == f1.n_tail);
    CHECK(f2.candidate_count == f1.candidate_count);
    CHECK(f2.alpha == doctest::Approx(f1.alpha).epsilon(1e-9));
    CHECK(f2.ks == doctest::Approx(f1.ks).epsilon(1e-9));
}

TEST_CASE("powerlaw: candidate cap trades little accuracy") {
    auto sample = gen_powerlaw_samples(2.5, 1.0, 5000, 23);
    PowerLawConfig full;
    full.max_candidates = 0;
    PowerLawConfig capped;
    capped.max_candidates = 200;
    auto ff = fit_xmin(sample, full);
    auto fc = fit_xmin(sample, capped);
    CHECK(fc.candidate_count <= 200);
    CHECK(fc.candidate_count > 20);
    CHECK(ff.candidate_count > fc.candidate_count);
    CHECK(std::fabs(fc.alpha - ff.alpha) < 0.2);
    CHECK(fc.x_min / ff.x_min < 4.0);
    CHECK(ff.x_min / fc.x_min < 4.0);
}

TEST_CASE("powerlaw: spliced sample puts x_min near the splice") {
    Rng body_rng(13);
    std::vector<double> sample;
    for (int i = 0; i < 600; ++i) sample.push_back(body_rng.uniform(0.25, 1.0));
    auto tail = gen_powerlaw_samples(2.5, 1.0, 400, 14);
    sample.insert(sample.end(), tail.begin(), tail.end());
    auto fit = fit_xmin(sample);
    CHECK(fit.x_min > 0.5);
    CHECK(fit.x_min < 2.0);
    CHECK(fit.alpha > 2.0);
    CHECK(fit.alpha < 3.2);
    CHECK(fit.n_tail >= 5);
    CHECK(fit.n_tail <= 1000);
}

TEST_CASE("powerlaw: bootstrap p-value is deterministic") {
    auto sample = gen_powerlaw_samples(2.5, 1.0, 300, 11);
    PowerLawConfig cfg;
    cfg.max_candidates = 0;
    auto fit = fit_xmin(sample, cfg);

    double p1 = gof_pvalue(sample, fit, 200, 99, cfg);
    double p2 = gof_pvalue(sample, fit, 200, 99, cfg);
    CHECK(p1 == p2);
    CHECK(p1 >= 0.0);
    CHECK(p1 <= 1.0);
    // the whole sample is the fitted law, so the fit should not be rejected
    CHECK(p1 > 0.05);

    // thread count changes the schedule, not the replicates
    PowerLawConfig two = cfg;
    two.threads = 2;
    CHECK(gof_pvalue(sample, fit, 200, 99, two) == p1);

    CHECK_THROWS_AS(gof_pvalue(sample, fit, 0, 99, cfg), ConfigError);
    CHECK_THROWS_AS(gof_pvalue(sample, fit, -5, 99, cfg), ConfigError);
}

TEST_CASE("powerlaw: exponential tail is rejected") {
    Rng rng(29);
    std::vector<double> sample;
    for (int i = 0; i < 3000; ++i)
        sample.push_back(1.0 + 2.0 * -std::log(1.0 - rng.uniform()));
    auto fit = fit_xmin(sample);
    double p = gof_pvalue(sample, fit, 200, 31);
    CHECK(p < 0.1);
}

TEST_CASE("powerlaw: small or constant samples fail loudly") {
    CHECK_THROWS_AS(fit_xmin(std::vector<double>{1.0, 2.0}), InsufficientDataError);
    std::vector<double> flat(50, 3.0);
    CHECK_THROWS_AS(fit_xmin(flat), InsufficientDataError);  // no candidate leaves a tail
    std::vector<double> neg = {1.0, 2.0, -3.0, 4.0, 5.0, 6.0};
    CHECK_THROWS_AS(fit_xmin(neg), DegenerateSampleError);

    // two distinct values: fit succeeds but is flagged degenerate
    std::vector<double> twov = {1.0, 1.0, 1.0, 1.0, 2.0, 2.0};
    PowerLawConfig cfg;
    cfg.min_tail = 2;
    auto fit = fit_xmin(twov, cfg);
    CHECK(fit.x_min == 1.0);
    CHECK(fit.n_tail == 6);
    CHECK(fit.candidate_count == 1);  // the upper value leaves a zero-spread tail
    CHECK(fit.degenerate_alpha == true);
}

TEST_CASE("powerlaw: binned-curve tail fit") {
    auto mags = gen_powerlaw_samples(4.0, 0.001, 8, 21);
    BinnedCurve curve;
    curve.direction = Direction::BuyerInitiated;
    curve.points.push_back({0.0, 0.0, 0.05, 99.0, 1});   // below threshold: ignored
    curve.points.push_back({0.0, 0.0, 0.1, 1e9, 1});     // at threshold: strict >, ignored
    curve.points.push_back({0.0, 0.0, 0.15, 0.0, 1});    // zero move: no magnitude
    for (std::size_t i = 0; i < mags.size(); ++i) {
        double sign = (i % 2 == 0) ? 1.0 : -1.0;
        curve.points.push_back({0.0, 0.0, 0.2 + 0.1 * double(i), sign * mags[i], 1});
    }

    PowerLawConfig cfg;
    cfg.n_boot = 0;
    auto fit = fit_tail_impacts(curve, 0.1, cfg);
    auto direct = fit_xmin(mags, cfg);
    CHECK(fit.alpha == direct.alpha);
    CHECK(fit.x_min == direct.x_min);
    CHECK(fit.ks == direct.ks);
    CHECK(fit.n_tail == direct.n_tail);
    CHECK(!fit.p_value.has_value());
    CHECK(fit.n_boot == 0);
    CHECK(fit.low_power == true);  // 8 bins is far below the default threshold

    // ignored points really are ignored: a curve with only the tail matches
    BinnedCurve trimmed;
    for (std::size_t i = 3; i < curve.points.size(); ++i)
        trimmed.points.push_back(curve.points[i]);
    auto fit2 = fit_tail_impacts(trimmed, 0.1, cfg);
    CHECK(fit2.alpha == fit.alpha);
    CHECK(fit2.x_min == fit.x_min);

    PowerLawConfig boot = cfg;
    boot.n_boot = 50;
    boot.seed = 9;
    auto fb1 = fit_tail_impacts(curve, 0.1, boot);
    auto fb2 = fit_tail_impacts(curve, 0.1, boot);
    REQUIRE(fb1.p_value.has_value());
    CHECK(*fb1.p_value == *fb2.p_value);
    CHECK(*fb1.p_value >= 0.0);
    CHECK(*fb1.p_value <= 1.0);
    CHECK(fb1.n_boot == 50);
    CHECK(fb1.seed == 9);

    // five tail bins are required with the default min_tail
    BinnedCurve sparse;
    for (int i = 0; i < 4; ++i)
        sparse.points.push_back({0.0, 0.0, 1.0 + double(i), 0.01 * double(i + 1), 1});
    CHECK_THROWS_AS(fit_tail_impacts(sparse, 0.0, PowerLawConfig{}), InsufficientDataError);
}
