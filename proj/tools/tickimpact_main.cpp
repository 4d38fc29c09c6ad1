#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tickimpact/errors.hpp"
#include "tickimpact/pipeline.hpp"
#include "tickimpact/synth.hpp"

using namespace tickimpact;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string dir_tag(Direction d) { return std::string(to_string(d)); }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> read_values(const std::filesystem::path& path) {
    std::vector<double> out;
    std::istringstream in(read_text(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        char* end = nullptr;
        double v = std::strtod(line.c_str() + start, &end);
        if (end == line.c_str() + start)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected a number");
        out.push_back(v);
    }
    return out;
}

BinnedCurve read_curve_csv(const std::filesystem::path& path) {
    BinnedCurve curve;
    curve.group_id = path.stem().string();
    std::istringstream in(read_text(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line_no == 1) continue;  // header
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() < 5)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected bin_lo,bin_hi,omega_star,delta_p_star,count");
        BinPoint p;
        p.bin_lo = std::strtod(fields[0].c_str(), nullptr);
        p.bin_hi = std::strtod(fields[1].c_str(), nullptr);
        p.omega_star = std::strtod(fields[2].c_str(), nullptr);
        p.delta_p_star = std::strtod(fields[3].c_str(), nullptr);
        p.count = std::strtoll(fields[4].c_str(), nullptr, 10);
        curve.points.push_back(p);
    }
    return curve;
}

std::string classified_csv(const ClassifiedStream& stream) {
    std::ostringstream out;
    out << "timestamp,vwap,total_volume,direction,prevailing_mid\n";
    for (const auto& t : stream.trades)
        out << format_iso8601(t.trade.timestamp) << ',' << fmt_double(t.trade.vwap) << ','
            << t.trade.total_volume << ',' << to_string(t.direction) << ','
            << fmt_double(t.prevailing_mid) << '\n';
    return out.str();
}

json counts_json(const std::map<std::string, std::int64_t>& m) {
    json j;
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

struct CleanedStock {
    std::vector<AggregatedTrade> trades;
    std::vector<QuoteEvent> quotes;
    json counts;
};

CleanedStock clean_stock(const std::filesystem::path& trades_path,
                         const std::filesystem::path& quotes_path, const TickFormat& format,
                         const SessionFilter& session) {
    CleanedStock out;
    auto pt = parse_trades(trades_path, format);
    auto pq = parse_quotes(quotes_path, format);
    auto ft = filter_trades(pt.events, session);
    auto fq = filter_quotes(pq.events, session);
    out.trades = aggregate_trades(ft.events);
    out.quotes = dedupe_quotes(fq.events);
    out.counts = {{"trade_rejections", counts_json(pt.rejections.as_map())},
                  {"quote_rejections", counts_json(pq.rejections.as_map())},
                  {"trade_filter", counts_json(ft.counts.as_map())},
                  {"quote_filter", counts_json(fq.counts.as_map())},
                  {"aggregated_trades", out.trades.size()},
                  {"deduped_quotes", out.quotes.size()}};
    return out;
}

json fit_json(const PowerLawFit& fit) {
    json j;
    j["alpha"] = fit.alpha;
    j["x_min"] = fit.x_min;
    j["ks"] = fit.ks;
    if (fit.p_value)
        j["p_value"] = *fit.p_value;
    else
        j["p_value"] = nullptr;
    j["n_tail"] = fit.n_tail;
    j["n_boot"] = fit.n_boot;
    j["seed"] = fit.seed;
    j["candidate_count"] = fit.candidate_count;
    j["low_power"] = fit.low_power;
    j["degenerate_alpha"] = fit.degenerate_alpha;
    return j;
}

// Run config matching a set of synthetic tapes: scenario session, ISO
// timestamps with a header row, and one or two periods over the scenario's
// day span.
std::string synth_run_config(const MarketScenario& scenario,
                             const std::vector<LabeledTape>& tapes,
                             const std::filesystem::path& out_dir) {
    // Absolute paths so the config works from any working directory.
    std::filesystem::path dir = std::filesystem::absolute(out_dir);
    RunConfig rc;
    rc.output_dir = (dir / "out").generic_string();
    rc.format.skip_rows = 1;
    rc.session = scenario.session;
    if (scenario.n_days >= 2) {
        std::int64_t half = scenario.n_days / 2;
        rc.periods.push_back({"before", scenario.first_day,
                              std::int32_t(scenario.first_day + half - 1), {}});
        rc.periods.push_back({"after", std::int32_t(scenario.first_day + half),
                              std::int32_t(scenario.first_day + scenario.n_days - 1), {}});
    } else {
        rc.periods.push_back({"all", scenario.first_day,
                              std::int32_t(scenario.first_day + scenario.n_days - 1), {}});
    }
    for (const auto& tape : tapes) {
        StockInput s;
        s.stock_id = tape.stock_id;
        s.group_id = tape.group_id;
        s.trades_path = (dir / (tape.stock_id + "_trades.csv")).generic_string();
        s.quotes_path = (dir / (tape.stock_id + "_quotes.csv")).generic_string();
        rc.stocks.push_back(std::move(s));
    }
    return run_config_to_ini(rc);
}

int run_cli(int argc, char** argv) {
    CLI::App app{"price-impact measurement pipeline for tick data"};
    app.require_subcommand(1);

    // shared ingest-ish options
    std::string trades_path, quotes_path, out_path, out_dir = ".";
    std::string config_path, scenario_path, stock_id = "STK";
    TickFormat format;
    std::string stamp = "iso8601";
    std::int64_t quote_lag = 0;

    auto add_format_opts = [&](CLI::App* cmd) {
        cmd->add_option("--skip-rows", format.skip_rows, "header rows to skip");
        cmd->add_option("--stamp", stamp, "timestamp format: iso8601 or epoch_micros");
        cmd->add_option("--delimiter", format.delimiter, "field delimiter");
    };

    auto* ingest = app.add_subcommand("ingest", "parse, filter, aggregate and dedupe ticks");
    ingest->add_option("--trades", trades_path, "trades file")->required();
    ingest->add_option("--quotes", quotes_path, "quotes file")->required();
    ingest->add_option("--out-dir", out_dir, "output directory");
    add_format_opts(ingest);

    auto* classify = app.add_subcommand("classify", "label trades buyer/seller initiated");
    classify->add_option("--trades", trades_path, "trades file")->required();
    classify->add_option("--quotes", quotes_path, "quotes file")->required();
    classify->add_option("--out", out_path, "classified trades csv");
    classify->add_option("--lag", quote_lag, "prevailing-quote lag, microseconds");
    add_format_opts(classify);

    auto* impact = app.add_subcommand("impact", "per-trade normalized impact observations");
    impact->add_option("--trades", trades_path, "trades file")->required();
    impact->add_option("--quotes", quotes_path, "quotes file")->required();
    impact->add_option("--out", out_path, "observations csv");
    impact->add_option("--stock-id", stock_id, "stock identifier for the output");
    impact->add_option("--lag", quote_lag, "prevailing-quote lag, microseconds");
    add_format_opts(impact);

    std::string values_path;
    PowerLawConfig pl;
    auto* fitcmd = app.add_subcommand("fit-powerlaw", "CSN power-law fit of a value file");
    fitcmd->add_option("--input", values_path, "one value per line")->required();
    fitcmd->add_option("--n-boot", pl.n_boot, "bootstrap replicates (0 skips the p-value)");
    fitcmd->add_option("--seed", pl.seed, "bootstrap seed");
    fitcmd->add_option("--min-tail", pl.min_tail, "minimum tail size");
    fitcmd->add_option("--max-candidates", pl.max_candidates, "x_min candidate cap");
    fitcmd->add_option("--threads", pl.threads, "bootstrap threads (0 = auto)");

    std::vector<std::string> curve_paths;
    std::vector<double> proxy_values;
    CollapseConfig cc;
    std::string rescaled_out;
    auto* colcmd = app.add_subcommand("collapse", "fit master-curve exponents over curves");
    colcmd->add_option("--curve", curve_paths, "curve csv (repeatable)")->required();
    colcmd->add_option("--proxy", proxy_values, "liquidity proxy per curve (repeatable)")
        ->required();
    colcmd->add_option("--n-bins", cc.n_bins, "collapse bins");
    colcmd->add_option("--grid-step", cc.grid_step, "grid step");
    colcmd->add_option("--grid-lo", cc.grid_lo, "grid lower bound");
    colcmd->add_option("--grid-hi", cc.grid_hi, "grid upper bound");
    colcmd->add_option("--out", rescaled_out, "rescaled points csv");
    double threshold_log10 = -0.9;
    colcmd->add_option("--threshold-log10", threshold_log10,
                       "keep bins with omega_star above 10^this");

    auto* synth = app.add_subcommand("synth", "generate labeled synthetic tapes");
    synth->add_option("--scenario", scenario_path, "scenario ini")->required();
    synth->add_option("--out-dir", out_dir, "tape directory")->required();

    auto* runcmd = app.add_subcommand("run", "full pipeline over a run config");
    runcmd->add_option("--config", config_path, "run config ini")->required();
    std::string output_override;
    runcmd->add_option("--output-dir", output_override, "override [run] output_dir");

    auto* plots = app.add_subcommand("emit-plots", "plot-ready projections of a finished run");
    std::string run_dir;
    plots->add_option("--run-dir", run_dir, "directory holding report.json")->required();

    CLI11_PARSE(app, argc, argv);

    if (stamp == "epoch_micros")
        format.stamp = TickFormat::Stamp::EpochMicros;
    else if (stamp != "iso8601")
        throw ConfigError("--stamp: expected iso8601 or epoch_micros");

    if (ingest->parsed()) {
        SessionFilter session;
        auto cleaned = clean_stock(trades_path, quotes_path, format, session);
        std::ostringstream tr;
        tr << "timestamp,vwap,total_volume\n";
        for (const auto& t : cleaned.trades)
            tr << format_iso8601(t.timestamp) << ',' << fmt_double(t.vwap) << ','
               << t.total_volume << '\n';
        std::ostringstream qu;
        qu << "timestamp,bid,ask\n";
        for (const auto& q : cleaned.quotes)
            qu << format_iso8601(q.timestamp) << ',' << fmt_double(q.bid) << ','
               << fmt_double(q.ask) << '\n';
        write_file_atomic(std::filesystem::path(out_dir) / "trades_clean.csv", tr.str());
        write_file_atomic(std::filesystem::path(out_dir) / "quotes_clean.csv", qu.str());
        std::cout << cleaned.counts.dump(2) << "\n";
        return 0;
    }

    if (classify->parsed()) {
        SessionFilter session;
        auto cleaned = clean_stock(trades_path, quotes_path, format, session);
        auto stream = classify_stream(cleaned.trades, cleaned.quotes, quote_lag);
        if (!out_path.empty()) write_file_atomic(out_path, classified_csv(stream));
        json j = cleaned.counts;
        j["classify"] = {{"input", stream.counts.input},
                         {"classified", stream.counts.classified},
                         {"dropped_no_quote", stream.counts.dropped_no_quote},
                         {"indeterminate", stream.counts.indeterminate}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (impact->parsed()) {
        SessionFilter session;
        auto cleaned = clean_stock(trades_path, quotes_path, format, session);
        auto stream = classify_stream(cleaned.trades, cleaned.quotes, quote_lag);
        auto impacts = compute_impacts(stream.trades, cleaned.quotes, stock_id);
        std::map<std::string, std::vector<double>> vols;
        for (const auto& t : cleaned.trades)
            vols[stock_id].push_back(double(t.total_volume));
        normalize_volumes(impacts.observations, vols);
        std::ostringstream out;
        out << "stock_id,date,omega,raw_volume,delta_p,price,direction\n";
        for (const auto& o : impacts.observations)
            out << o.stock_id << ',' << format_date(std::int32_t(o.day)) << ','
                << fmt_double(o.omega) << ',' << fmt_double(o.raw_volume) << ','
                << fmt_double(o.delta_p) << ',' << fmt_double(o.price) << ','
                << to_string(o.direction) << '\n';
        if (!out_path.empty()) write_file_atomic(out_path, out.str());
        json j = cleaned.counts;
        j["impact"] = counts_json(impacts.counts.as_map());
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (fitcmd->parsed()) {
        auto values = read_values(values_path);
        PowerLawFit fit = fit_xmin(values, pl);
        fit.n_boot = pl.n_boot;
        if (pl.n_boot > 0) fit.p_value = gof_pvalue(values, fit, pl.n_boot, pl.seed, pl);
        std::cout << fit_json(fit).dump(2) << "\n";
        return 0;
    }

    if (colcmd->parsed()) {
        if (curve_paths.size() != proxy_values.size())
            throw ConfigError("--curve and --proxy must be given the same number of times");
        std::vector<BinnedCurve> curves;
        std::vector<LiquidityProxy> proxies;
        double threshold = std::pow(10.0, threshold_log10);
        for (std::size_t i = 0; i < curve_paths.size(); ++i) {
            BinnedCurve c = filter_curve(read_curve_csv(curve_paths[i]), threshold);
            curves.push_back(std::move(c));
            proxies.push_back({curves.back().group_id, proxy_values[i]});
        }
        CollapseResult r = fit_collapse(curves, proxies, cc);
        json j;
        j["gamma"] = r.gamma;
        j["delta"] = r.delta;
        j["epsilon"] = r.epsilon;
        j["n_bins"] = r.n_bins;
        j["used_bins"] = r.used_bins;
        j["skipped_bins"] = r.skipped_bins;
        j["identifiable"] = r.identifiable;
        std::cout << j.dump(2) << "\n";
        if (!rescaled_out.empty()) {
            std::ostringstream out;
            out << "group_id,C,x,y\n";
            for (const auto& g : r.rescaled_curves)
                for (const auto& p : g.points)
                    out << g.group_id << ',' << fmt_double(g.C) << ',' << fmt_double(p.x) << ','
                        << fmt_double(p.y) << '\n';
            write_file_atomic(rescaled_out, out.str());
        }
        return 0;
    }

    if (synth->parsed()) {
        MarketScenario scenario = load_scenario(scenario_path);
        auto tapes = gen_market(scenario);
        std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        json files = json::array();
        for (const auto& tape : tapes) {
            auto t = dir / (tape.stock_id + "_trades.csv");
            auto q = dir / (tape.stock_id + "_quotes.csv");
            auto l = dir / (tape.stock_id + "_labels.csv");
            write_tape(tape, t, q, l);
            files.push_back(t.generic_string());
            files.push_back(q.generic_string());
            files.push_back(l.generic_string());
        }
        auto cfg = dir / "run_config.ini";
        write_file_atomic(cfg, synth_run_config(scenario, tapes, dir));
        files.push_back(cfg.generic_string());
        json j;
        j["stocks"] = tapes.size();
        std::int64_t n_trades = 0, n_quotes = 0;
        for (const auto& tape : tapes) {
            n_trades += std::int64_t(tape.trades.size());
            n_quotes += std::int64_t(tape.quotes.size());
        }
        j["trades"] = n_trades;
        j["quotes"] = n_quotes;
        j["seed"] = scenario.seed;
        j["files"] = files;
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (runcmd->parsed()) {
        RunConfig config = load_run_config(config_path);
        if (!output_override.empty()) config.output_dir = output_override;
        RunReport report = run_pipeline(config);
        auto plot_files = emit_plot_data(report);
        json j;
        j["output_dir"] = config.output_dir.generic_string();
        j["files"] = report.files.size() + plot_files.size();
        json groups = json::array();
        for (const auto& g : report.groups) {
            json gj{{"group", g.group_id}, {"period", g.period_name}, {"failed", g.failed}};
            if (g.failed) gj["error"] = g.error;
            groups.push_back(gj);
        }
        j["groups"] = groups;
        json collapses = json::array();
        for (const auto& pc : report.collapses) {
            json cj{{"period", pc.period_name},
                    {"direction", dir_tag(pc.direction)},
                    {"failed", pc.failed}};
            if (!pc.failed && pc.attempted) {
                cj["gamma"] = pc.result.gamma;
                cj["delta"] = pc.result.delta;
                cj["identifiable"] = pc.result.identifiable;
            }
            collapses.push_back(cj);
        }
        j["collapse"] = collapses;
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (plots->parsed()) {
        std::filesystem::path dir(run_dir);
        if (!std::filesystem::exists(dir / "report.json"))
            throw IoError("missing dependency: " + (dir / "report.json").string() +
                          " (run the pipeline first)");
        RunConfig config = load_run_config(dir / "config_echo.ini");
        config.output_dir = dir;
        RunReport report = run_pipeline(config);  // deterministic re-derivation
        auto files = emit_plot_data(report);
        json j;
        j["plots"] = files;
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const Error& e) {
        json j{{"error", e.kind}, {"message", e.what()}};
        std::cerr << j.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        json j{{"error", "internal"}, {"message", e.what()}};
        std::cerr << j.dump() << "\n";
        return 2;
    }
}
