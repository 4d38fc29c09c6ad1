#include "tickimpact/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tickimpact/errors.hpp"

namespace tickimpact {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string dir_tag(Direction d) { return std::string(to_string(d)); }

std::string curve_csv(const BinnedCurve& curve) {
    std::ostringstream out;
    out << "bin_lo,bin_hi,omega_star,delta_p_star,count\n";
    for (const auto& p : curve.points)
        out << fmt_double(p.bin_lo) << ',' << fmt_double(p.bin_hi) << ','
            << fmt_double(p.omega_star) << ',' << fmt_double(p.delta_p_star) << ',' << p.count
            << '\n';
    return out.str();
}

std::string daily_csv(const std::vector<DailyAverage>& days) {
    std::ostringstream out;
    out << "stock_id,date,direction,mean_volume,mean_impact,mean_price,n_trades\n";
    for (const auto& d : days)
        out << d.stock_id << ',' << format_date(std::int32_t(d.day)) << ','
            << to_string(d.direction) << ',' << fmt_double(d.mean_volume) << ','
            << fmt_double(d.mean_impact) << ',' << fmt_double(d.mean_price) << ',' << d.n_trades
            << '\n';
    return out.str();
}

void hist_rows(std::ostringstream& out, const std::string& metric, const Histogram& h) {
    for (const auto& b : h.bins)
        out << metric << ',' << fmt_double(b.lo) << ',' << fmt_double(b.hi) << ',' << b.count
            << ',' << fmt_double(b.mass) << '\n';
}

std::string hist_csv(const DailyDistributions& daily) {
    std::ostringstream out;
    out << "metric,lo,hi,count,mass\n";
    hist_rows(out, "volume", daily.volume_hist);
    hist_rows(out, "impact", daily.impact_hist);
    hist_rows(out, "price", daily.price_hist);
    return out.str();
}

std::string rescaled_csv(const CollapseResult& result) {
    std::ostringstream out;
    out << "group_id,C,omega_star,delta_p_star,x,y\n";
    for (const auto& g : result.rescaled_curves) {
        double xs = std::pow(g.C, result.delta);
        double ys = std::pow(g.C, -result.gamma);
        for (const auto& p : g.points)
            out << g.group_id << ',' << fmt_double(g.C) << ',' << fmt_double(p.x * xs) << ','
                << fmt_double(p.y * ys) << ',' << fmt_double(p.x) << ',' << fmt_double(p.y)
                << '\n';
    }
    return out.str();
}

json fit_to_json(const PowerLawFit& fit, const std::string& group, const std::string& period,
                 Direction dir) {
    json j;
    j["group"] = group;
    j["period"] = period;
    j["direction"] = dir_tag(dir);
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

json collapse_to_json(const PeriodCollapse& pc) {
    json j;
    j["period"] = pc.period_name;
    j["direction"] = dir_tag(pc.direction);
    j["attempted"] = pc.attempted;
    j["failed"] = pc.failed;
    if (!pc.error.empty()) j["error"] = pc.error;
    if (pc.attempted && !pc.failed) {
        j["gamma"] = pc.result.gamma;
        j["delta"] = pc.result.delta;
        j["epsilon"] = pc.result.epsilon;
        j["n_bins"] = pc.result.n_bins;
        j["used_bins"] = pc.result.used_bins;
        j["skipped_bins"] = pc.result.skipped_bins;
        j["identifiable"] = pc.result.identifiable;
        json groups = json::array();
        for (const auto& g : pc.result.rescaled_curves)
            groups.push_back({{"group", g.group_id}, {"C", g.C}});
        j["groups"] = groups;
        j["search"] = {{"grid_lo", pc.result.config.grid_lo},
                       {"grid_hi", pc.result.config.grid_hi},
                       {"grid_step", pc.result.config.grid_step},
                       {"refine_tol", pc.result.config.refine_tol},
                       {"max_refine_iter", pc.result.config.max_refine_iter}};
    }
    return j;
}

json filter_counts_json(const FilterCounts& c) {
    json j;
    for (const auto& [k, v] : c.as_map()) j[k] = v;
    return j;
}

json rejection_counts_json(const RejectionCounts& c) {
    json j;
    for (const auto& [k, v] : c.as_map()) j[k] = v;
    return j;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

RunReport run_pipeline(const RunConfig& config) {
    config.validate();
    RunReport report;
    report.config = config;
    const BinEdges edges = config.impact_edges();
    const double threshold = config.volume_threshold();

    struct ParsedStock {
        ParsedTrades trades;
        ParsedQuotes quotes;
    };
    std::map<std::string, ParsedStock> parsed;
    for (const auto& s : config.stocks) {
        ParsedStock ps{parse_trades(s.trades_path, config.format),
                       parse_quotes(s.quotes_path, config.format)};
        report.parse_counts.push_back({s.stock_id, ps.trades.rejections, ps.quotes.rejections});
        parsed.emplace(s.stock_id, std::move(ps));
    }

    std::map<std::string, std::vector<const StockInput*>> groups;
    for (const auto& s : config.stocks) groups[s.group_id].push_back(&s);

    auto emit = [&](const std::filesystem::path& rel, const std::string& content) {
        write_file_atomic(config.output_dir / rel, content);
        report.files.push_back(rel.generic_string());
    };

    emit("config_echo.ini", run_config_to_ini(config));

    for (const auto& period : config.periods) {
        for (const auto& [gid, members] : groups) {
            GroupPeriodResult g;
            g.group_id = gid;
            g.period_name = period.name;
            try {
                std::vector<ClassifiedTrade> pooled_classified;
                std::vector<ImpactObservation> pooled_obs;
                std::map<std::string, std::vector<double>> group_volumes;
                std::set<std::int32_t> active_days;

                for (const StockInput* s : members) {
                    const ParsedStock& ps = parsed.at(s->stock_id);
                    StockStageCounts sc;
                    sc.stock_id = s->stock_id;

                    std::vector<TradeEvent> period_trades;
                    for (const auto& e : ps.trades.events) {
                        auto d = day_of(e.timestamp);
                        if (d < period.first_day || d > period.last_day)
                            ++sc.out_of_period_trades;
                        else
                            period_trades.push_back(e);
                    }
                    std::vector<QuoteEvent> period_quotes;
                    for (const auto& e : ps.quotes.events) {
                        auto d = day_of(e.timestamp);
                        if (d < period.first_day || d > period.last_day)
                            ++sc.out_of_period_quotes;
                        else
                            period_quotes.push_back(e);
                    }

                    auto ft = filter_trades(period_trades, config.session);
                    sc.trade_filter = ft.counts;
                    auto fq = filter_quotes(period_quotes, config.session);
                    sc.quote_filter = fq.counts;
                    auto agg = aggregate_trades(ft.events);
                    sc.aggregated_trades = std::int64_t(agg.size());
                    auto ded = dedupe_quotes(fq.events);
                    sc.deduped_quotes = std::int64_t(ded.size());
                    auto cls = classify_stream(agg, ded, config.quote_lag);
                    sc.classify = cls.counts;
                    auto imp = compute_impacts(cls.trades, ded, s->stock_id);
                    sc.impact = imp.counts;

                    auto& vols = group_volumes[s->stock_id];
                    for (const auto& t : agg) vols.push_back(double(t.total_volume));
                    for (const auto& t : cls.trades) active_days.insert(day_of(t.trade.timestamp));
                    pooled_classified.insert(pooled_classified.end(), cls.trades.begin(),
                                             cls.trades.end());
                    pooled_obs.insert(pooled_obs.end(), imp.observations.begin(),
                                      imp.observations.end());
                    g.stocks.push_back(std::move(sc));
                }

                if (pooled_classified.empty())
                    throw InsufficientDataError("no classified trades in period");
                g.n_days = period.n_days_override.value_or(std::int64_t(active_days.size()));
                normalize_volumes(pooled_obs, group_volumes);
                g.observations = std::int64_t(pooled_obs.size());
                g.proxy = liquidity_proxy(pooled_classified, g.n_days, gid);
                g.buyer.curve =
                    bin_curve(pooled_obs, edges, Direction::BuyerInitiated, gid);
                g.seller.curve =
                    bin_curve(pooled_obs, edges, Direction::SellerInitiated, gid);
                for (DirectionResult* dr : {&g.buyer, &g.seller}) {
                    try {
                        PowerLawFit fit =
                            fit_tail_impacts(dr->curve, threshold, config.powerlaw);
                        dr->fit = fit;
                    } catch (const Error& e) {
                        dr->fit_error = e.kind + ": " + e.what();
                    }
                }
                g.daily = daily_distributions(pooled_obs, std::size_t(g.n_days));

                std::filesystem::path base = std::filesystem::path(period.name) / gid;
                emit(base / "curve_buyer.csv", curve_csv(g.buyer.curve));
                emit(base / "curve_seller.csv", curve_csv(g.seller.curve));
                if (g.buyer.fit)
                    emit(base / "fit_buyer.json",
                         fit_to_json(*g.buyer.fit, gid, period.name,
                                     Direction::BuyerInitiated)
                                 .dump(2) +
                             "\n");
                if (g.seller.fit)
                    emit(base / "fit_seller.json",
                         fit_to_json(*g.seller.fit, gid, period.name,
                                     Direction::SellerInitiated)
                                 .dump(2) +
                             "\n");
                emit(base / "daily_averages.csv", daily_csv(g.daily.averages));
                emit(base / "histograms.csv", hist_csv(g.daily));
                if (config.per_stock_curves) {
                    for (const StockInput* s : members) {
                        std::vector<ImpactObservation> mine;
                        for (const auto& o : pooled_obs)
                            if (o.stock_id == s->stock_id) mine.push_back(o);
                        for (Direction dir :
                             {Direction::BuyerInitiated, Direction::SellerInitiated}) {
                            BinnedCurve c = bin_curve(mine, edges, dir, s->stock_id);
                            emit(base / ("curve_" + s->stock_id + "_" + dir_tag(dir) + ".csv"),
                                 curve_csv(c));
                        }
                    }
                }
            } catch (const Error& e) {
                g.failed = true;
                g.error = e.kind + ": " + e.what();
            }
            report.groups.push_back(std::move(g));
        }

        for (Direction dir : {Direction::BuyerInitiated, Direction::SellerInitiated}) {
            PeriodCollapse pc;
            pc.period_name = period.name;
            pc.direction = dir;
            std::vector<BinnedCurve> curves;
            std::vector<LiquidityProxy> proxies;
            for (const auto& g : report.groups) {
                if (g.period_name != period.name || g.failed) continue;
                const DirectionResult& dr =
                    dir == Direction::BuyerInitiated ? g.buyer : g.seller;
                BinnedCurve f = filter_curve(dr.curve, threshold);
                if (!f.points.empty()) {
                    curves.push_back(std::move(f));
                    proxies.push_back(g.proxy);
                }
            }
            if (curves.size() < 2) {
                pc.failed = true;
                pc.error = "insufficient_data: collapse needs >= 2 group curves above the "
                           "volume threshold";
            } else {
                pc.attempted = true;
                try {
                    pc.result = fit_collapse(curves, proxies, config.collapse);
                    emit(std::filesystem::path(period.name) /
                             ("collapse_" + dir_tag(dir) + ".json"),
                         collapse_to_json(pc).dump(2) + "\n");
                    emit(std::filesystem::path(period.name) /
                             ("rescaled_" + dir_tag(dir) + ".csv"),
                         rescaled_csv(pc.result));
                } catch (const Error& e) {
                    pc.failed = true;
                    pc.error = e.kind + ": " + e.what();
                }
            }
            report.collapses.push_back(std::move(pc));
        }
    }

    report.files.push_back("report.json");
    write_file_atomic(config.output_dir / "report.json", report_to_json(report));
    return report;
}

std::string report_to_json(const RunReport& report) {
    json j;
    j["version"] = report.version;
    j["config_echo"] = "config_echo.ini";
    j["output_dir"] = report.config.output_dir.generic_string();

    json parse = json::array();
    for (const auto& p : report.parse_counts)
        parse.push_back({{"stock", p.stock_id},
                         {"trades", rejection_counts_json(p.trades)},
                         {"quotes", rejection_counts_json(p.quotes)}});
    j["parse_counts"] = parse;

    json periods = json::array();
    for (const auto& p : report.config.periods) {
        json pj{{"name", p.name},
                {"start", format_date(p.first_day)},
                {"end", format_date(p.last_day)}};
        if (p.n_days_override) pj["n_days"] = *p.n_days_override;
        periods.push_back(pj);
    }
    j["periods"] = periods;

    json groups = json::array();
    for (const auto& g : report.groups) {
        json gj;
        gj["group"] = g.group_id;
        gj["period"] = g.period_name;
        gj["failed"] = g.failed;
        if (!g.error.empty()) gj["error"] = g.error;
        if (!g.failed) {
            gj["n_days"] = g.n_days;
            gj["liquidity_proxy"] = g.proxy.C;
            gj["observations"] = g.observations;
            for (const DirectionResult* dr : {&g.buyer, &g.seller}) {
                json dj;
                dj["bins"] = dr->curve.points.size();
                dj["out_of_range"] = dr->curve.out_of_range;
                if (dr->fit)
                    dj["fit"] = fit_to_json(*dr->fit, g.group_id, g.period_name,
                                            dr->curve.direction);
                if (!dr->fit_error.empty()) dj["fit_error"] = dr->fit_error;
                gj[dir_tag(dr->curve.direction)] = dj;
            }
        }
        json stocks = json::array();
        for (const auto& s : g.stocks) {
            json sj;
            sj["stock"] = s.stock_id;
            sj["out_of_period_trades"] = s.out_of_period_trades;
            sj["out_of_period_quotes"] = s.out_of_period_quotes;
            sj["trade_filter"] = filter_counts_json(s.trade_filter);
            sj["quote_filter"] = filter_counts_json(s.quote_filter);
            sj["aggregated_trades"] = s.aggregated_trades;
            sj["deduped_quotes"] = s.deduped_quotes;
            sj["classify"] = {{"input", s.classify.input},
                              {"classified", s.classify.classified},
                              {"dropped_no_quote", s.classify.dropped_no_quote},
                              {"indeterminate", s.classify.indeterminate}};
            json ij;
            for (const auto& [k, v] : s.impact.as_map()) ij[k] = v;
            sj["impact"] = ij;
            stocks.push_back(sj);
        }
        gj["stocks"] = stocks;
        groups.push_back(gj);
    }
    j["groups"] = groups;

    json collapses = json::array();
    for (const auto& pc : report.collapses) collapses.push_back(collapse_to_json(pc));
    j["collapse"] = collapses;

    j["files"] = report.files;
    j["seeds"] = {{"powerlaw", report.config.powerlaw.seed}};
    return j.dump(2) + "\n";
}

std::vector<std::string> emit_plot_data(const RunReport& report) {
    std::vector<std::string> written;
    const auto& config = report.config;
    auto emit = [&](const std::filesystem::path& rel, const std::string& content) {
        write_file_atomic(config.output_dir / rel, content);
        written.push_back(rel.generic_string());
    };

    for (const auto& period : config.periods) {
        for (Direction dir : {Direction::BuyerInitiated, Direction::SellerInitiated}) {
            std::ostringstream out;
            out << "group_id,omega_star,delta_p_star,count\n";
            bool any = false;
            for (const auto& g : report.groups) {
                if (g.period_name != period.name || g.failed) continue;
                const BinnedCurve& c =
                    dir == Direction::BuyerInitiated ? g.buyer.curve : g.seller.curve;
                for (const auto& p : c.points) {
                    out << g.group_id << ',' << fmt_double(p.omega_star) << ','
                        << fmt_double(p.delta_p_star) << ',' << p.count << '\n';
                    any = true;
                }
            }
            if (any)
                emit(std::filesystem::path("plots") /
                         ("impact_curves_" + period.name + "_" + dir_tag(dir) + ".csv"),
                     out.str());
        }
        for (const auto& pc : report.collapses) {
            if (pc.period_name != period.name || !pc.attempted || pc.failed) continue;
            emit(std::filesystem::path("plots") /
                     ("collapse_" + period.name + "_" + dir_tag(pc.direction) + ".csv"),
                 rescaled_csv(pc.result));
        }
        for (const auto& g : report.groups) {
            if (g.period_name != period.name || g.failed) continue;
            emit(std::filesystem::path("plots") /
                     ("daily_hist_" + period.name + "_" + g.group_id + ".csv"),
                 hist_csv(g.daily));
        }
    }
    return written;
}

}  // namespace tickimpact
