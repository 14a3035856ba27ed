#include "tailcal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "tailcal/csv.hpp"
#include "tailcal/dataset.hpp"
#include "tailcal/grammar.hpp"
#include "tailcal/random.hpp"
#include "tailcal/scoring.hpp"
#include "tailcal/svg.hpp"
#include "tailcal/version.hpp"

namespace tailcal::harness {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string threshold_tag(double value) {
    std::string s = format_double(value);
    for (auto& c : s)
        if (c == '-') c = 'm';
    return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open for writing: " + path.string());
    out << text;
}

BinPartition to_partition(const BinSpec& spec) {
    if (spec.quantile_bins > 0)
        return BinPartition::by_covariate_quantiles(spec.covariate, spec.quantile_bins);
    return BinPartition::by_covariate(spec.covariate, spec.breakpoints);
}

nlohmann::ordered_json config_json(const RunConfig& config,
                                   const std::vector<ResolvedThreshold>& resolved) {
    nlohmann::ordered_json j;
    j["u_grid_points"] = config.u_grid_points;
    j["seed"] = config.seed;
    if (config.ci_level) j["ci_level"] = *config.ci_level;
    j["tests"] = config.run_tests;
    j["marginal"] = config.marginal;
    if (config.bins) {
        nlohmann::ordered_json b;
        b["covariate"] = config.bins->covariate;
        if (config.bins->quantile_bins > 0)
            b["quantile_bins"] = config.bins->quantile_bins;
        else
            b["breakpoints"] = config.bins->breakpoints;
        j["bins"] = std::move(b);
    }
    nlohmann::ordered_json ts = nlohmann::ordered_json::array();
    for (const auto& t : resolved) {
        nlohmann::ordered_json e;
        e["tag"] = t.tag;
        e["value"] = t.value;
        e["description"] = t.description;
        ts.push_back(std::move(e));
    }
    j["thresholds"] = std::move(ts);
    return j;
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    nlohmann::ordered_json config, std::vector<std::string> outputs) {
    nlohmann::ordered_json j;
    j["tool"] = "tailcal";
    j["version"] = tailcal::version();
    j["command"] = command;
    j["config"] = std::move(config);
    std::sort(outputs.begin(), outputs.end());
    j["outputs"] = outputs;
    write_text(out_dir / "manifest.json", j.dump(2) + "\n");
}

PlotSeries curve_series_from_csv(const std::filesystem::path& csv_path,
                                 const std::string& label) {
    CsvTable table = read_csv_table(csv_path);
    std::size_t xc = table.columns[0] == "u" ? table.column("u") : 0;
    std::size_t vc = table.column("value");
    PlotSeries s;
    s.label = label;
    bool has_band = true;
    std::size_t lc = 0, uc = 0;
    try {
        lc = table.column("lower");
        uc = table.column("upper");
    } catch (const error&) {
        has_band = false;
    }
    for (const auto& row : table.rows) {
        s.x.push_back(row[xc]);
        s.y.push_back(row[vc]);
        if (has_band && !std::isnan(row[lc])) {
            s.lower.push_back(row[lc]);
            s.upper.push_back(row[uc]);
        }
    }
    if (s.lower.size() != s.x.size()) {
        s.lower.clear();
        s.upper.clear();
    }
    return s;
}

}  // namespace

std::vector<ResolvedThreshold> resolve_thresholds(const ThresholdSpec& spec, Pairs pairs) {
    std::vector<ResolvedThreshold> out;
    if (spec.include_standard_pit)
        out.push_back({kNegInf, "pit", "standard PIT (t = -inf)"});
    for (double t : spec.raw) {
        if (!std::isfinite(t)) throw domain_error("raw thresholds must be finite");
        out.push_back({t, "t" + threshold_tag(t), "raw threshold " + format_double(t)});
    }
    for (double level : spec.quantile_levels) {
        if (!(level > 0.0 && level < 1.0))
            throw domain_error("threshold quantile levels must lie in (0, 1)");
        double t = observation_quantile(pairs, level);
        out.push_back({t, "q" + threshold_tag(level),
                       "observation quantile " + format_double(level) + " -> t = " +
                           format_double(t)});
    }
    if (out.empty()) throw domain_error("no thresholds requested");
    return out;
}

int run_diagnose(const RunConfig& config, const std::filesystem::path& dataset_path,
                 std::ostream& log) {
    auto pairs = read_dataset(dataset_path);
    if (pairs.empty()) throw parse_error("dataset is empty: " + dataset_path.string());
    std::filesystem::create_directories(config.out_dir);

    auto resolved = resolve_thresholds(config.thresholds, pairs);
    auto u_grid = default_u_grid(config.u_grid_points);
    CurveOptions opts;
    opts.randomizer_seed = config.seed;

    bool adaptive = std::any_of(pairs.begin(), pairs.end(),
                                [](const auto& p) { return p.threshold_override.has_value(); });

    std::vector<std::string> outputs;
    bool partial = false;
    nlohmann::ordered_json tests = nlohmann::ordered_json::array();

    struct PanelEntry {
        std::string tag;
        std::filesystem::path csv;
    };
    std::vector<PanelEntry> combined_panels, severity_panels;

    for (const auto& rt : resolved) {
        std::vector<std::string> comments;
        comments.push_back("threshold=" + format_double(rt.value) + " (" + rt.description +
                           ")");
        if (adaptive) comments.push_back("per-record threshold overrides apply");

        try {
            DiagnosticCurve combined = combined_ratio_curve(pairs, rt.value, u_grid, opts);
            if (config.ci_level) attach_band(combined, pairs, *config.ci_level, opts);
            auto path = config.out_dir / ("combined_" + rt.tag + ".csv");
            write_curve_csv(path, combined, comments);
            outputs.push_back(path.filename().string());
            combined_panels.push_back({rt.tag, path});
        } catch (const error& e) {
            log << "warning: combined ratio at " << rt.tag << ": " << e.what() << '\n';
            partial = true;
        }

        try {
            DiagnosticCurve severity = severity_pp_curve(pairs, rt.value, u_grid, opts);
            if (config.ci_level) attach_band(severity, pairs, *config.ci_level, opts);
            auto path = config.out_dir / ("severity_" + rt.tag + ".csv");
            write_curve_csv(path, severity, comments);
            outputs.push_back(path.filename().string());
            severity_panels.push_back({rt.tag, path});
        } catch (const error& e) {
            log << "warning: severity curve at " << rt.tag << ": " << e.what() << '\n';
            partial = true;
        }

        if (config.bins) {
            try {
                auto partition = to_partition(*config.bins);
                auto curves = binned_combined_ratio(pairs, partition, rt.value, u_grid, opts);
                for (std::size_t j = 0; j < curves.size(); ++j) {
                    auto path = config.out_dir /
                                ("combined_" + rt.tag + "_bin" + std::to_string(j + 1) + ".csv");
                    auto bin_comments = comments;
                    bin_comments.push_back("bin " + std::to_string(j + 1) + " of " +
                                           std::to_string(curves.size()) +
                                           (curves[j].degenerate ? " (degenerate)" : ""));
                    write_curve_csv(path, curves[j], bin_comments);
                    outputs.push_back(path.filename().string());
                    if (curves[j].degenerate) {
                        log << "warning: bin " << j + 1 << " degenerate at " << rt.tag << '\n';
                        partial = true;
                    }
                }
            } catch (const error& e) {
                log << "warning: binned curves at " << rt.tag << ": " << e.what() << '\n';
                partial = true;
            }
        }

        if (config.marginal) {
            try {
                double x_max = config.marginal_x_max.value_or(0.0);
                if (!(x_max > 0.0)) {
                    double ymax = kNegInf;
                    for (const auto& p : pairs) ymax = std::max(ymax, p.observation);
                    x_max = std::max(ymax - rt.value, 1e-6);
                }
                std::vector<double> x_grid(config.marginal_points);
                for (std::size_t i = 0; i < x_grid.size(); ++i)
                    x_grid[i] = x_max * static_cast<double>(i) /
                                static_cast<double>(x_grid.size() - 1);
                auto curve = marginal_tail_curve(pairs, rt.value, x_grid, opts);
                auto path = config.out_dir / ("marginal_" + rt.tag + ".csv");
                auto m_comments = comments;
                m_comments.push_back("sup_distance=" + format_double(curve.sup_distance));
                write_marginal_csv(path, curve, m_comments);
                outputs.push_back(path.filename().string());
            } catch (const error& e) {
                log << "warning: marginal curve at " << rt.tag << ": " << e.what() << '\n';
                partial = true;
            }
        }

        if (config.run_tests && rt.value != kNegInf) {
            try {
                std::vector<double> z;
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    const auto& p = pairs[i];
                    double ti = p.threshold_override.value_or(rt.value);
                    std::optional<double> v;
                    if (!p.forecast.continuous())
                        v = Rng::substream(config.seed, i).next();
                    if (auto zi = excess_pit(p, ti, v)) z.push_back(*zi);
                }
                TestReport ks = ks_uniform_test(z);
                TestReport binom = binomial_occurrence_test(pairs, rt.value);
                for (const auto& r : {ks, binom}) {
                    nlohmann::ordered_json e;
                    e["threshold_tag"] = rt.tag;
                    e["threshold"] = rt.value;
                    e["kind"] = r.kind;
                    e["statistic"] = r.statistic;
                    e["p_value"] = r.p_value;
                    e["n"] = r.n;
                    e["null"] = r.null_description;
                    tests.push_back(std::move(e));
                }
            } catch (const error& e) {
                log << "warning: tests at " << rt.tag << ": " << e.what() << '\n';
                partial = true;
            }
        }
    }

    // occurrence series over the finite thresholds
    {
        std::vector<double> finite;
        for (const auto& rt : resolved)
            if (rt.value != kNegInf) finite.push_back(rt.value);
        std::sort(finite.begin(), finite.end());
        if (!finite.empty()) {
            try {
                RatioSeries series = occurrence_ratio_series(pairs, finite);
                if (config.ci_level) attach_band(series, pairs, *config.ci_level);
                auto path = config.out_dir / "occurrence.csv";
                write_series_csv(path, series, {"occurrence ratio per threshold"});
                outputs.push_back(path.filename().string());

                if (config.bins) {
                    auto partition = to_partition(*config.bins);
                    std::size_t bins = partition.assign(pairs).size();
                    std::vector<RatioSeries> sup_series(bins);
                    for (auto& s : sup_series) s.kind = SeriesKind::sup_distance;
                    auto u_grid_local = default_u_grid(config.u_grid_points);
                    for (double t : finite) {
                        auto curves =
                            binned_combined_ratio(pairs, partition, t, u_grid_local, opts);
                        for (std::size_t j = 0; j < bins; ++j) {
                            sup_series[j].thresholds.push_back(t);
                            sup_series[j].values.push_back(
                                curves[j].degenerate
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : sup_distance(curves[j]));
                            sup_series[j].n_exceedances.push_back(curves[j].n_exceedances);
                        }
                    }
                    for (std::size_t j = 0; j < bins; ++j) {
                        auto path_j = config.out_dir /
                                      ("supdist_bin" + std::to_string(j + 1) + ".csv");
                        write_series_csv(path_j, sup_series[j],
                                         {"sup distance of binned combined ratio, bin " +
                                          std::to_string(j + 1)});
                        outputs.push_back(path_j.filename().string());
                    }
                }
            } catch (const error& e) {
                log << "warning: occurrence series: " << e.what() << '\n';
                partial = true;
            }
        }
    }

    if (config.run_tests) {
        write_text(config.out_dir / "tests.json", tests.dump(2) + "\n");
        outputs.push_back("tests.json");
    }

    // SVG panels are rendered from the CSV files just written
    {
        PlotSpec combined_plot;
        combined_plot.title = "combined ratio";
        combined_plot.x_label = "u";
        combined_plot.y_label = "ratio";
        combined_plot.diagonal = true;
        for (const auto& panel : combined_panels)
            combined_plot.series.push_back(curve_series_from_csv(panel.csv, panel.tag));
        if (!combined_plot.series.empty()) {
            write_text(config.out_dir / "combined.svg", render_svg(combined_plot));
            outputs.push_back("combined.svg");
        }

        PlotSpec severity_plot;
        severity_plot.title = "severity pp-plot";
        severity_plot.x_label = "u";
        severity_plot.y_label = "empirical cdf";
        severity_plot.diagonal = true;
        for (const auto& panel : severity_panels)
            severity_plot.series.push_back(curve_series_from_csv(panel.csv, panel.tag));
        if (!severity_plot.series.empty()) {
            write_text(config.out_dir / "severity.svg", render_svg(severity_plot));
            outputs.push_back("severity.svg");
        }

        auto occurrence_csv = config.out_dir / "occurrence.csv";
        if (std::filesystem::exists(occurrence_csv)) {
            CsvTable table = read_csv_table(occurrence_csv);
            PlotSeries s;
            s.label = "occurrence";
            std::size_t tc = table.column("t"), vc = table.column("value");
            bool band = true;
            std::size_t lc = 0, uc = 0;
            try {
                lc = table.column("lower");
                uc = table.column("upper");
            } catch (const error&) {
                band = false;
            }
            for (const auto& row : table.rows) {
                s.x.push_back(row[tc]);
                s.y.push_back(row[vc]);
                if (band && !std::isnan(row[lc])) {
                    s.lower.push_back(row[lc]);
                    s.upper.push_back(row[uc]);
                }
            }
            if (s.lower.size() != s.x.size()) {
                s.lower.clear();
                s.upper.clear();
            }
            PlotSpec occ_plot;
            occ_plot.title = "occurrence ratio";
            occ_plot.x_label = "t";
            occ_plot.y_label = "ratio";
            occ_plot.reference_one = true;
            occ_plot.series.push_back(std::move(s));
            write_text(config.out_dir / "occurrence.svg", render_svg(occ_plot));
            outputs.push_back("occurrence.svg");
        }
    }

    write_manifest(config.out_dir, "diagnose " + dataset_path.string(),
                   config_json(config, resolved), outputs);
    return partial ? 1 : 0;
}

void run_simulate(const simlab::ScenarioSpec& spec, const std::filesystem::path& out_dir,
                  std::ostream& log) {
    auto result = simlab::generate(spec);
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> outputs;
    for (const auto& stream : result.streams) {
        auto path = out_dir / (spec.name + "_" + stream.name + ".jsonl");
        write_dataset(path, stream.pairs);
        outputs.push_back(path.filename().string());
        log << "wrote " << path.string() << " (" << stream.pairs.size() << " pairs)\n";
    }
    log << "marginal law of observations: " << result.marginal_law << '\n';

    nlohmann::ordered_json cfg;
    cfg["scenario"] = spec.name;
    cfg["n"] = spec.n;
    cfg["seed"] = spec.seed;
    for (const auto& [k, v] : spec.params) cfg["params"][k] = v;
    cfg["marginal_law"] = result.marginal_law;
    write_manifest(out_dir, "simulate " + spec.name, std::move(cfg), std::move(outputs));
}

std::vector<TestReport> run_test(const std::filesystem::path& dataset_path,
                                 const ThresholdSpec& threshold, const std::string& kind,
                                 std::uint64_t seed) {
    auto pairs = read_dataset(dataset_path);
    if (pairs.empty()) throw parse_error("dataset is empty: " + dataset_path.string());
    auto resolved = resolve_thresholds(threshold, pairs);
    if (resolved.size() != 1) throw domain_error("test: exactly one threshold required");
    double t = resolved.front().value;

    std::vector<TestReport> reports;
    if (kind == "ks" || kind == "both") {
        std::vector<double> z;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto& p = pairs[i];
            double ti = p.threshold_override.value_or(t);
            std::optional<double> v;
            if (!p.forecast.continuous()) v = Rng::substream(seed, i).next();
            if (auto zi = excess_pit(p, ti, v)) z.push_back(*zi);
        }
        reports.push_back(ks_uniform_test(z));
    }
    if (kind == "binomial" || kind == "both") {
        reports.push_back(binomial_occurrence_test(pairs, t));
    }
    if (reports.empty()) throw domain_error("test: unknown kind '" + kind + "'");
    return reports;
}

std::vector<std::string> repro_ids() {
    return {"exp-trio", "exp-trio-binned", "uniform-unfocused", "nonrandom-tailmatch",
            "misinformed", "optimistic", "normal-quartet", "insensitivity"};
}

int run_repro(const std::string& id, std::size_t n, std::uint64_t seed,
              const std::filesystem::path& out_dir, std::ostream& log) {
    std::filesystem::create_directories(out_dir);
    auto diag = [&](const std::vector<ForecastObservationPair>& pairs,
                    const std::filesystem::path& dir, RunConfig config) {
        std::filesystem::create_directories(dir);
        auto tmp = dir / "pairs.jsonl";
        write_dataset(tmp, pairs);
        config.out_dir = dir;
        config.seed = seed;
        return run_diagnose(config, tmp, log);
    };

    RunConfig base;
    base.thresholds.quantile_levels = {0.8, 0.9, 0.95, 0.99};
    base.thresholds.include_standard_pit = true;

    int rc = 0;
    if (id == "exp-trio" || id == "exp-trio-binned") {
        auto result = simlab::gen_exponential_trio(n, seed, 0.25, 1.4);
        for (const auto& stream : result.streams) {
            RunConfig config = base;
            if (id == "exp-trio-binned") {
                config.bins = BinSpec{"delta", {}, 3};
                config.thresholds.include_standard_pit = false;
                config.thresholds.quantile_levels = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
            }
            rc |= diag(stream.pairs, out_dir / stream.name, config);
        }
    } else if (id == "uniform-unfocused") {
        auto result = simlab::gen_uniform_unfocused(n, seed);
        RunConfig config = base;
        config.thresholds.quantile_levels = {0.5, 0.8, 0.9, 0.95, 0.99};
        rc |= diag(result.streams[0].pairs, out_dir, config);
    } else if (id == "nonrandom-tailmatch") {
        auto result = simlab::gen_nonrandom_tailmatch(n, seed);
        rc |= diag(result.streams[0].pairs, out_dir, base);
    } else if (id == "misinformed") {
        auto result = simlab::gen_misinformed(n, seed, 0.25);
        RunConfig config = base;
        config.marginal = true;
        rc |= diag(result.streams[0].pairs, out_dir, config);
    } else if (id == "optimistic") {
        auto result = simlab::gen_optimistic(n, seed, 0.25);
        RunConfig config = base;
        config.bins = BinSpec{"delta", {}, 3};
        rc |= diag(result.streams[0].pairs, out_dir, config);
    } else if (id == "normal-quartet") {
        auto result = simlab::gen_normal_quartet(n, seed);
        for (const auto& stream : result.streams)
            rc |= diag(stream.pairs, out_dir / stream.name, base);
    } else if (id == "insensitivity") {
        Dist g = Dist::gpd(1.0, 0.25);
        Dist h = Dist::gpd(1.0, 0.5);
        std::vector<double> lambdas{0.5, 0.1, 0.01, 0.001};
        auto rows = mixture_insensitivity_check(g, h, lambdas, std::min<std::size_t>(n, 50000),
                                                seed);
        std::ofstream out(out_dir / "insensitivity.csv", std::ios::binary);
        out << "lambda,gap,gap_se,bound,bound_se,within_3se\n";
        for (const auto& r : rows)
            out << format_double(r.lambda) << ',' << format_double(r.gap) << ','
                << format_double(r.gap_se) << ',' << format_double(r.bound) << ','
                << format_double(r.bound_se) << ',' << (r.inequality_within_3se ? 1 : 0)
                << '\n';
        log << "wrote " << (out_dir / "insensitivity.csv").string() << '\n';
        nlohmann::ordered_json cfg;
        cfg["id"] = id;
        cfg["n"] = n;
        cfg["seed"] = seed;
        write_manifest(out_dir, "repro " + id, std::move(cfg), {"insensitivity.csv"});
    } else {
        throw domain_error("unknown repro id '" + id + "'");
    }
    return rc;
}

}  // namespace tailcal::harness
