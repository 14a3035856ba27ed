// tailcal command-line interface.
//
// Subcommands: simulate, diagnose, test, emos fit, emos predict, repro.
// Exit codes: 0 success, 1 diagnostics partially degenerate, 2 usage or
// parse error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tailcal/dataset.hpp"
#include "tailcal/emos.hpp"
#include "tailcal/grammar.hpp"
#include "tailcal/harness.hpp"
#include "tailcal/version.hpp"

namespace {

using namespace tailcal;

std::vector<EmosRow> read_emos_rows(const std::filesystem::path& path) {
    // Ensemble datasets (.csv with y,m1..mK or JSONL with member arrays)
    // are reduced to (mean, sd, y); JSONL records may instead carry
    // {"y":..., "mean":..., "sd":...} directly.
    std::vector<EmosRow> rows;
    if (path.extension() == ".csv") {
        for (const auto& p : read_dataset(path)) {
            const auto& e = std::get<Dist::Ensemble>(p.forecast.node());
            double n = static_cast<double>(e.members.size());
            double mean = 0.0;
            for (double m : e.members) mean += m;
            mean /= n;
            double var = 0.0;
            for (double m : e.members) var += (m - mean) * (m - mean);
            double sd = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
            rows.push_back({mean, sd, p.observation});
        }
        return rows;
    }
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || !rec.contains("y"))
            throw parse_error(path.string() + ":" + std::to_string(lineno) +
                              ": invalid EMOS record");
        EmosRow row;
        row.y = rec["y"].get<double>();
        if (rec.contains("mean") && rec.contains("sd")) {
            row.mean = rec["mean"].get<double>();
            row.sd = rec["sd"].get<double>();
        } else if (rec.contains("forecast") && rec["forecast"].is_array()) {
            std::vector<double> members = rec["forecast"].get<std::vector<double>>();
            if (members.empty())
                throw parse_error(path.string() + ":" + std::to_string(lineno) +
                                  ": empty ensemble");
            double n = static_cast<double>(members.size());
            double mean = 0.0;
            for (double m : members) mean += m;
            mean /= n;
            double var = 0.0;
            for (double m : members) var += (m - mean) * (m - mean);
            row.mean = mean;
            row.sd = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        } else {
            throw parse_error(path.string() + ":" + std::to_string(lineno) +
                              ": record needs mean/sd or an ensemble");
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tail-calibration diagnostics for probabilistic forecasts"};
    app.set_version_flag("--version", TAILCAL_VERSION);
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "generate a synthetic forecast scenario");
    std::string scenario;
    sim->add_option("scenario", scenario, "one of: " + [] {
           std::string s;
           for (const auto& n : simlab::scenario_names()) s += n + " ";
           return s;
       }())
        ->required();
    std::size_t sim_n = 1000;
    std::uint64_t sim_seed = 1;
    std::string sim_out = ".";
    double gamma = 0.25, nu = 1.4, xi = 0.25, eta = 0.25, sigma_f = 1.0;
    sim->add_option("--n", sim_n, "number of pairs");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "output directory");
    sim->add_option("--gamma", gamma, "gamma parameter");
    sim->add_option("--nu", nu, "extremist rate bias");
    sim->add_option("--xi", xi, "observation GPD shape");
    sim->add_option("--eta", eta, "forecast GPD shape");
    sim->add_option("--sigma-f", sigma_f, "forecast GPD scale");

    // ---- diagnose ----
    auto* diag = app.add_subcommand("diagnose", "compute tail-calibration diagnostics");
    std::string diag_data, diag_out = "diagnostics";
    std::vector<double> thresholds, threshold_quantiles;
    std::size_t u_grid = 101;
    double ci_level = 0.0;
    bool with_tests = false, with_marginal = false, standard_pit = false;
    std::string bins_spec;
    std::uint64_t diag_seed = 1;
    std::size_t marginal_points = 101;
    double marginal_x_max = 0.0;
    diag->add_option("--data", diag_data, "dataset (.jsonl or .csv)")->required();
    diag->add_option("--out", diag_out, "output directory");
    diag->add_option("--thresholds", thresholds, "raw threshold values")->delimiter(',');
    diag->add_option("--threshold-quantiles", threshold_quantiles,
                     "observation quantile levels, e.g. 0.9,0.99,0.995")
        ->delimiter(',');
    diag->add_option("--u-grid", u_grid, "number of u grid points");
    diag->add_option("--ci", ci_level, "confidence level for pointwise bands");
    diag->add_flag("--tests", with_tests, "also run KS and binomial tests");
    diag->add_flag("--marginal", with_marginal, "emit the marginal tail curve");
    diag->add_option("--marginal-points", marginal_points, "marginal curve grid size");
    diag->add_option("--marginal-x-max", marginal_x_max, "marginal curve x range");
    diag->add_flag("--standard-pit", standard_pit, "include the t = -inf PIT panel");
    diag->add_option("--bins", bins_spec,
                     "covariate bins: 'name:J' for J quantile bins or 'name:b1,b2,...'");
    diag->add_option("--seed", diag_seed, "seed for randomized PITs");

    // ---- test ----
    auto* test = app.add_subcommand("test", "KS / binomial tail-calibration tests");
    std::string test_data, test_kind = "both";
    double test_threshold = 0.0, test_quantile = 0.0;
    bool have_threshold = false;
    std::uint64_t test_seed = 1;
    test->add_option("--data", test_data, "dataset (.jsonl or .csv)")->required();
    auto* thr_opt = test->add_option("--threshold", test_threshold, "raw threshold");
    test->add_option("--threshold-quantile", test_quantile, "observation quantile level");
    test->add_option("--kind", test_kind, "ks | binomial | both");
    test->add_option("--seed", test_seed, "seed for randomized PITs");
    (void)have_threshold;

    // ---- emos ----
    auto* emos = app.add_subcommand("emos", "CRPS-minimizing ensemble post-processing");
    emos->require_subcommand(1);
    auto* fit = emos->add_subcommand("fit", "fit EMOS coefficients");
    std::string fit_data, fit_family = "censored-logistic", fit_out = "emos_model.json";
    std::size_t fit_budget = 4000;
    double fit_censor = 0.0;
    std::vector<double> fit_init;
    fit->add_option("--data", fit_data, "training data (.csv y,m1..mK or .jsonl)")->required();
    fit->add_option("--family", fit_family, "censored-logistic | censored-gev");
    fit->add_option("--out", fit_out, "model JSON path");
    fit->add_option("--budget", fit_budget, "objective evaluation budget");
    fit->add_option("--censor", fit_censor, "censoring point");
    fit->add_option("--init", fit_init, "initial a,b,c,d[,shape]")->delimiter(',');

    auto* predict = emos->add_subcommand("predict", "apply a fitted EMOS model");
    std::string pred_model, pred_data, pred_out = "forecasts.jsonl";
    predict->add_option("--model", pred_model, "model JSON path")->required();
    predict->add_option("--data", pred_data, "rows with ensembles or mean/sd")->required();
    predict->add_option("--out", pred_out, "output dataset path");

    // ---- repro ----
    auto* repro = app.add_subcommand("repro", "regenerate a synthetic study");
    std::string repro_id;
    std::size_t repro_n = 100000;
    std::uint64_t repro_seed = 1;
    std::string repro_out = "repro";
    repro->add_option("id", repro_id, "one of: " + [] {
             std::string s;
             for (const auto& n : harness::repro_ids()) s += n + " ";
             return s;
         }())
        ->required();
    repro->add_option("--n", repro_n, "sample size");
    repro->add_option("--seed", repro_seed, "RNG seed");
    repro->add_option("--out", repro_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            simlab::ScenarioSpec spec;
            spec.name = scenario;
            spec.n = sim_n;
            spec.seed = sim_seed;
            if (sim->count("--gamma")) spec.params["gamma"] = gamma;
            if (sim->count("--nu")) spec.params["nu"] = nu;
            if (sim->count("--xi")) spec.params["xi"] = xi;
            if (sim->count("--eta")) spec.params["eta"] = eta;
            if (sim->count("--sigma-f")) spec.params["sigma_f"] = sigma_f;
            harness::run_simulate(spec, sim_out, std::cout);
            return 0;
        }

        if (diag->parsed()) {
            harness::RunConfig config;
            config.thresholds.raw = thresholds;
            config.thresholds.quantile_levels = threshold_quantiles;
            config.thresholds.include_standard_pit = standard_pit;
            config.u_grid_points = u_grid;
            if (diag->count("--ci")) config.ci_level = ci_level;
            config.run_tests = with_tests;
            config.marginal = with_marginal;
            config.marginal_points = marginal_points;
            if (diag->count("--marginal-x-max")) config.marginal_x_max = marginal_x_max;
            config.seed = diag_seed;
            config.out_dir = diag_out;
            if (!bins_spec.empty()) {
                auto colon = bins_spec.find(':');
                if (colon == std::string::npos)
                    throw domain_error("--bins expects 'name:J' or 'name:b1,b2,...'");
                harness::BinSpec bins;
                bins.covariate = bins_spec.substr(0, colon);
                std::string rest = bins_spec.substr(colon + 1);
                if (rest.find(',') == std::string::npos &&
                    rest.find('.') == std::string::npos) {
                    bins.quantile_bins = std::stoul(rest);
                } else {
                    std::istringstream ss(rest);
                    std::string cell;
                    while (std::getline(ss, cell, ',')) bins.breakpoints.push_back(std::stod(cell));
                }
                config.bins = bins;
            }
            return harness::run_diagnose(config, diag_data, std::cerr);
        }

        if (test->parsed()) {
            harness::ThresholdSpec spec;
            if (thr_opt->count()) spec.raw.push_back(test_threshold);
            if (test->count("--threshold-quantile")) spec.quantile_levels.push_back(test_quantile);
            auto reports = harness::run_test(test_data, spec, test_kind, test_seed);
            for (const auto& r : reports) std::cout << r.to_json() << '\n';
            return 0;
        }

        if (fit->parsed()) {
            auto rows = read_emos_rows(fit_data);
            EmosModel::Family family;
            if (fit_family == "censored-logistic")
                family = EmosModel::Family::censored_logistic;
            else if (fit_family == "censored-gev")
                family = EmosModel::Family::censored_gev;
            else
                throw domain_error("unknown EMOS family '" + fit_family + "'");
            EmosInit init;
            init.censor_point = fit_censor;
            if (!fit_init.empty()) {
                if (fit_init.size() < 4) throw domain_error("--init needs a,b,c,d[,shape]");
                init.a = fit_init[0];
                init.b = fit_init[1];
                init.c = fit_init[2];
                init.d = fit_init[3];
                if (fit_init.size() > 4) init.gev_shape = fit_init[4];
            }
            EmosModel model = emos_fit(rows, family, init, fit_budget);
            std::ofstream out(fit_out, std::ios::binary);
            out << model.to_json() << '\n';
            std::cout << model.to_json() << '\n';
            std::cerr << (model.converged ? "converged" : "budget exhausted") << " after "
                      << model.evals << " objective evaluations\n";
            return 0;
        }

        if (predict->parsed()) {
            std::ifstream in(pred_model);
            if (!in) throw parse_error("cannot open model: " + pred_model);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            EmosModel model = EmosModel::from_json(text);
            auto rows = read_emos_rows(pred_data);
            std::vector<ForecastObservationPair> pairs;
            pairs.reserve(rows.size());
            for (const auto& row : rows)
                pairs.push_back({model.predict(row.mean, row.sd), row.y, {}, std::nullopt});
            write_dataset(pred_out, pairs);
            std::cout << "wrote " << pred_out << " (" << pairs.size() << " forecasts)\n";
            return 0;
        }

        if (repro->parsed()) {
            return harness::run_repro(repro_id, repro_n, repro_seed, repro_out, std::cout);
        }
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
