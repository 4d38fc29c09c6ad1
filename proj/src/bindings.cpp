#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "tickimpact/errors.hpp"
#include "tickimpact/pipeline.hpp"
#include "tickimpact/synth.hpp"

namespace py = pybind11;
using namespace tickimpact;

namespace {

BinnedCurve curve_from_arrays(const std::vector<double>& omega,
                              const std::vector<double>& delta_p) {
    if (omega.size() != delta_p.size())
        throw ConfigError("omega and delta_p must have the same length");
    BinnedCurve curve;
    curve.direction = Direction::BuyerInitiated;
    for (std::size_t i = 0; i < omega.size(); ++i)
        curve.points.push_back({omega[i], omega[i], omega[i], delta_p[i], 1});
    return curve;
}

py::dict fit_to_dict(const PowerLawFit& fit) {
    py::dict d;
    d["alpha"] = fit.alpha;
    d["x_min"] = fit.x_min;
    d["ks"] = fit.ks;
    d["p_value"] = fit.p_value ? py::object(py::float_(*fit.p_value)) : py::none();
    d["n_tail"] = fit.n_tail;
    d["n_boot"] = fit.n_boot;
    d["candidate_count"] = fit.candidate_count;
    d["low_power"] = fit.low_power;
    d["degenerate_alpha"] = fit.degenerate_alpha;
    return d;
}

}  // namespace

PYBIND11_MODULE(_tickimpact, m) {
    m.doc() = "price-impact measurement pipeline: power-law fits, impact curves, collapse";

    m.def("gen_powerlaw_samples", &gen_powerlaw_samples, py::arg("alpha"), py::arg("x_min"),
          py::arg("n"), py::arg("seed"));

    m.def("mle_alpha",
          [](const std::vector<double>& sample, double x_min) {
              return mle_alpha(sample, x_min);
          },
          py::arg("sample"), py::arg("x_min"));

    m.def("ks_distance",
          [](const std::vector<double>& sample, double alpha, double x_min) {
              return ks_distance(sample, alpha, x_min);
          },
          py::arg("sample"), py::arg("alpha"), py::arg("x_min"));

    m.def("fit_power_law",
          [](const std::vector<double>& sample, std::size_t min_tail,
             std::size_t max_candidates, std::int64_t n_boot, std::uint64_t seed) {
              PowerLawConfig config;
              config.min_tail = min_tail;
              config.max_candidates = max_candidates;
              config.n_boot = n_boot;
              config.seed = seed;
              PowerLawFit fit = fit_xmin(sample, config);
              fit.n_boot = n_boot;
              if (n_boot > 0) fit.p_value = gof_pvalue(sample, fit, n_boot, seed, config);
              return fit_to_dict(fit);
          },
          py::arg("sample"), py::arg("min_tail") = 5, py::arg("max_candidates") = 1000,
          py::arg("n_boot") = 0, py::arg("seed") = 0);

    m.def("bin_curve",
          [](const std::vector<double>& omega, const std::vector<double>& delta_p,
             double lo_log10, double hi_log10, std::size_t n_bins) {
              if (omega.size() != delta_p.size())
                  throw ConfigError("omega and delta_p must have the same length");
              std::vector<ImpactObservation> obs(omega.size());
              for (std::size_t i = 0; i < omega.size(); ++i) {
                  obs[i].omega = omega[i];
                  obs[i].delta_p = delta_p[i];
                  obs[i].direction = Direction::BuyerInitiated;
              }
              BinEdges edges = BinEdges::log_spaced(std::pow(10.0, lo_log10),
                                                    std::pow(10.0, hi_log10), n_bins);
              BinnedCurve curve = bin_curve(obs, edges, Direction::BuyerInitiated);
              py::dict d;
              std::vector<double> lo, hi, os, dp;
              std::vector<std::int64_t> count;
              for (const auto& p : curve.points) {
                  lo.push_back(p.bin_lo);
                  hi.push_back(p.bin_hi);
                  os.push_back(p.omega_star);
                  dp.push_back(p.delta_p_star);
                  count.push_back(p.count);
              }
              d["bin_lo"] = lo;
              d["bin_hi"] = hi;
              d["omega_star"] = os;
              d["delta_p_star"] = dp;
              d["count"] = count;
              d["out_of_range"] = curve.out_of_range;
              return d;
          },
          py::arg("omega"), py::arg("delta_p"), py::arg("lo_log10") = -3.2,
          py::arg("hi_log10") = 1.0, py::arg("n_bins") = 20);

    m.def("collapse_error",
          [](const std::vector<std::pair<std::vector<double>, std::vector<double>>>& curves,
             const std::vector<double>& proxies, double gamma, double delta,
             std::size_t n_bins) {
              std::vector<BinnedCurve> cs;
              std::vector<LiquidityProxy> ps;
              for (std::size_t i = 0; i < curves.size(); ++i) {
                  cs.push_back(curve_from_arrays(curves[i].first, curves[i].second));
                  ps.push_back({"G" + std::to_string(i + 1),
                                i < proxies.size() ? proxies[i] : 0.0});
              }
              return collapse_error(cs, ps, gamma, delta, n_bins).epsilon;
          },
          py::arg("curves"), py::arg("proxies"), py::arg("gamma"), py::arg("delta"),
          py::arg("n_bins") = 10);

    m.def("fit_collapse",
          [](const std::vector<std::pair<std::vector<double>, std::vector<double>>>& curves,
             const std::vector<double>& proxies, std::size_t n_bins, double grid_step) {
              std::vector<BinnedCurve> cs;
              std::vector<LiquidityProxy> ps;
              for (std::size_t i = 0; i < curves.size(); ++i) {
                  cs.push_back(curve_from_arrays(curves[i].first, curves[i].second));
                  ps.push_back({"G" + std::to_string(i + 1),
                                i < proxies.size() ? proxies[i] : 0.0});
              }
              CollapseConfig config;
              config.n_bins = n_bins;
              config.grid_step = grid_step;
              CollapseResult r = fit_collapse(cs, ps, config);
              py::dict d;
              d["gamma"] = r.gamma;
              d["delta"] = r.delta;
              d["epsilon"] = r.epsilon;
              d["identifiable"] = r.identifiable;
              d["used_bins"] = r.used_bins;
              d["skipped_bins"] = r.skipped_bins;
              return d;
          },
          py::arg("curves"), py::arg("proxies"), py::arg("n_bins") = 10,
          py::arg("grid_step") = 0.01);

    m.def("classify_trades",
          [](const std::vector<std::int64_t>& trade_ts, const std::vector<double>& price,
             const std::vector<std::int64_t>& volume, const std::vector<std::int64_t>& quote_ts,
             const std::vector<double>& bid, const std::vector<double>& ask,
             std::int64_t lag) {
              if (trade_ts.size() != price.size() || trade_ts.size() != volume.size())
                  throw ConfigError("trade arrays must have the same length");
              if (quote_ts.size() != bid.size() || quote_ts.size() != ask.size())
                  throw ConfigError("quote arrays must have the same length");
              std::vector<AggregatedTrade> trades(trade_ts.size());
              for (std::size_t i = 0; i < trade_ts.size(); ++i)
                  trades[i] = {trade_ts[i], price[i], volume[i]};
              std::vector<QuoteEvent> quotes(quote_ts.size());
              for (std::size_t i = 0; i < quote_ts.size(); ++i)
                  quotes[i] = {quote_ts[i], bid[i], ask[i]};
              auto stream = classify_stream(trades, quotes, lag);
              std::vector<std::string> out;
              out.reserve(stream.trades.size());
              for (const auto& t : stream.trades)
                  out.emplace_back(to_string(t.direction));
              return out;
          },
          py::arg("trade_ts"), py::arg("price"), py::arg("volume"), py::arg("quote_ts"),
          py::arg("bid"), py::arg("ask"), py::arg("lag") = 0);

    m.def("run_pipeline",
          [](const std::string& config_path) {
              RunReport report = run_pipeline(load_run_config(config_path));
              return report_to_json(report);
          },
          py::arg("config_path"));

    py::register_exception<Error>(m, "PipelineError");
}
