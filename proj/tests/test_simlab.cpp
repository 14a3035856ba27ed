#include "doctest.h"

#include <cmath>

#include "tailcal/grammar.hpp"
#include "tailcal/inference.hpp"
#include "tailcal/random.hpp"
#include "tailcal/simlab.hpp"

using namespace tailcal;
using namespace tailcal::simlab;

TEST_CASE("identical specs give bitwise-identical pairs") {
    ScenarioSpec spec{"misinformed", 500, 42, {{"gamma", 0.25}}};
    auto a = generate(spec);
    auto b = generate(spec);
    REQUIRE(a.streams.size() == b.streams.size());
    for (std::size_t s = 0; s < a.streams.size(); ++s) {
        REQUIRE(a.streams[s].pairs.size() == b.streams[s].pairs.size());
        for (std::size_t i = 0; i < a.streams[s].pairs.size(); ++i) {
            const auto& pa = a.streams[s].pairs[i];
            const auto& pb = b.streams[s].pairs[i];
            CHECK(pa.observation == pb.observation);
            CHECK(format_dist(pa.forecast) == format_dist(pb.forecast));
            REQUIRE(pa.covariates.size() == pb.covariates.size());
            for (std::size_t c = 0; c < pa.covariates.size(); ++c) {
                CHECK(pa.covariates[c].first == pb.covariates[c].first);
                CHECK(pa.covariates[c].second == pb.covariates[c].second);
            }
        }
    }
}

TEST_CASE("the exponential trio shares one (delta, Y) realization") {
    auto trio = gen_exponential_trio(300, 9, 0.25, 1.4);
    REQUIRE(trio.streams.size() == 3);
    for (std::size_t i = 0; i < 300; ++i) {
        double y = trio.streams[0].pairs[i].observation;
        CHECK(trio.streams[1].pairs[i].observation == y);
        CHECK(trio.streams[2].pairs[i].observation == y);
        double delta = *trio.streams[0].pairs[i].covariate("delta");
        CHECK(*trio.streams[2].pairs[i].covariate("delta") == delta);
        // extremist rate is delta / nu
        const auto& ex = std::get<Dist::Exponential>(trio.streams[2].pairs[i].forecast.node());
        CHECK(ex.rate == doctest::Approx(delta / 1.4).epsilon(1e-15));
    }
}

TEST_CASE("every generator's observation marginal matches its analytic law") {
    std::vector<ScenarioSpec> specs;
    for (const auto& name : scenario_names()) specs.push_back({name, 2000, 0, {}});
    for (auto& spec : specs) {
        int passes = 0;
        const int reps = 100;
        for (int rep = 0; rep < reps; ++rep) {
            spec.seed = 10000 + rep;
            auto result = generate(spec);
            std::vector<double> u;
            for (const auto& p : result.streams[0].pairs)
                u.push_back(result.marginal_cdf(p.observation));
            if (ks_uniform_test(u).p_value > 0.01) ++passes;
        }
        INFO("scenario ", spec.name);
        CHECK(passes >= 95);
    }
}

TEST_CASE("tail unfocused occurrence ratios split by tau") {
    auto result = gen_tail_unfocused(100000, 21);
    const auto& pairs = result.streams[0].pairs;
    const double t = 2.0;

    std::vector<ForecastObservationPair> plus, minus;
    for (const auto& p : pairs)
        (*p.covariate("tau") > 0 ? plus : minus).push_back(p);

    CHECK(std::fabs(occurrence_ratio(plus, t) - 2.0 / 3.0) < 0.05);
    CHECK(std::fabs(occurrence_ratio(minus, t) - 2.0) < 0.05);
    CHECK(std::fabs(occurrence_ratio(pairs, t) - 1.0) < 0.03);

    // pooled excess PITs are uniform
    std::vector<double> z;
    for (const auto& p : pairs)
        if (auto zi = excess_pit(p, t)) z.push_back(*zi);
    CHECK(ks_uniform_test(z).p_value > 0.01);
}

TEST_CASE("uniform unfocused: probabilistically calibrated, tail miscalibrated") {
    auto result = gen_uniform_unfocused(200000, 33);
    const auto& pairs = result.streams[0].pairs;
    auto grid = default_u_grid();

    // ordinary PITs sit on the diagonal
    auto pp = combined_ratio_curve(pairs, -std::numeric_limits<double>::infinity(), grid);
    CHECK(sup_distance(pp) < 0.01);

    // at t = 0.9 the severity law is min(11u, 1)/2 + u/2
    auto severity = severity_pp_curve(pairs, 0.9, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double u = grid[j];
        double expected = 0.5 * std::min((2.0 - 0.9) / (1.0 - 0.9) * u, 1.0) + 0.5 * u;
        CHECK(std::fabs(severity.values[j] - expected) < 0.02);
    }
}

TEST_CASE("nonrandom tail match") {
    auto result = gen_nonrandom_tailmatch(200000, 44);
    const auto& pairs = result.streams[0].pairs;
    const Dist& forecast = pairs.front().forecast;

    // splice is monotone (checked numerically around the breakpoint)
    double prev = 0.0;
    for (double x = 4.0; x < 6.0; x += 0.001) {
        double c = forecast.cdf(x);
        CHECK(c >= prev);
        prev = c;
    }

    // tail auto-calibrated: combined ratio on the diagonal for t >= 5
    auto grid = default_u_grid();
    auto combined = combined_ratio_curve(pairs, 5.0, grid);
    CHECK(sup_distance(combined) < 0.05);

    // but not probabilistically calibrated overall
    auto pp = combined_ratio_curve(pairs, -std::numeric_limits<double>::infinity(), grid);
    CHECK(sup_distance(pp) > 0.05);
}

TEST_CASE("optimistic forecaster: tail calibrated pooled, not per bin") {
    auto result = gen_optimistic(1000000, 55, 0.25);
    const auto& pairs = result.streams[0].pairs;
    auto grid = default_u_grid();
    const double g = 0.25;

    // exact occurrence ratio at finite t:
    //   lambda(t) + (1 - lambda(t)) (1 + g t / 2)^{-1/g} / (1 + g t)^{-1/g}
    // with lambda the GPD(1, g/2) cdf; it decays to 1 only as t grows, so
    // the pooled distance shrinks across quantile levels
    auto analytic_occ = [g](double t) {
        double lam = 1.0 - std::pow(1.0 + 0.5 * g * t, -2.0 / g);
        double e_g1 = std::pow(1.0 + g * t, -1.0 / g);
        double e_g2 = std::pow(1.0 + 0.5 * g * t, -1.0 / g);
        return lam + (1.0 - lam) * e_g2 / e_g1;
    };

    double prev_sup = 1e9;
    for (double q : {0.9, 0.99, 0.995}) {
        double t = observation_quantile(pairs, q);
        auto curve = combined_ratio_curve(pairs, t, grid);
        double occ = curve.values.back();
        double se = 1.0 / std::sqrt(static_cast<double>(curve.n_exceedances));
        CHECK(std::fabs(occ - analytic_occ(t)) < 3.5 * se);
        double sup = sup_distance(curve);
        CHECK(sup < prev_sup);
        prev_sup = sup;
    }
    CHECK(prev_sup < 0.03);  // approaching the diagonal at the 0.995 quantile

    double t_low = observation_quantile(pairs, 0.8);
    double t_high = observation_quantile(pairs, 0.99);
    auto partition = BinPartition::by_covariate_quantiles("delta", 3);
    auto low_curves = binned_combined_ratio(pairs, partition, t_low, grid);
    auto high_curves = binned_combined_ratio(pairs, partition, t_high, grid);
    bool any_grew = false;
    bool any_large_at_high = false;
    for (std::size_t j = 0; j < 3; ++j) {
        double dl = sup_distance(low_curves[j]);
        double dh = sup_distance(high_curves[j]);
        if (dh >= dl) any_grew = true;
        if (dh > 0.05) any_large_at_high = true;
    }
    CHECK(any_grew);
    CHECK(any_large_at_high);
}

TEST_CASE("marginal of the optimistic X component is GPD(1, gamma)") {
    // the building block behind the construction: X | D ~ Exp(D) with
    // D ~ Gamma(1/g, rate 1/g) has marginal GPD(1, g)
    const double gamma = 0.25;
    Dist delta_law = Dist::gamma(1.0 / gamma, gamma);
    Dist gpd = Dist::gpd(1.0, gamma);
    Rng rng(66);
    const int n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        double d = delta_law.sample(rng);
        x = Dist::exponential(d).sample(rng);
    }
    std::sort(xs.begin(), xs.end());
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
        double emp = static_cast<double>(std::lower_bound(xs.begin(), xs.end(), t) -
                                         xs.begin()) /
                     n;
        CHECK(std::fabs(emp - gpd.cdf(t)) < 0.01);
    }
}

TEST_CASE("normal quartet") {
    auto result = gen_normal_quartet(1000000, 77);
    REQUIRE(result.streams.size() == 4);
    auto grid = default_u_grid();
    const auto& ideal = result.streams[0].pairs;
    const auto& clim = result.streams[1].pairs;
    const auto& unfocused = result.streams[2].pairs;
    const auto& reversed = result.streams[3].pairs;
    const double kNegInf = -std::numeric_limits<double>::infinity();

    // unfocused: ordinary PITs uniform, excess PITs at the 0.99 quantile not
    auto pp = combined_ratio_curve(unfocused, kNegInf, grid);
    CHECK(sup_distance(pp) < 0.01);
    double t99 = observation_quantile(unfocused, 0.99);
    std::vector<double> z;
    for (const auto& p : unfocused)
        if (auto zi = excess_pit(p, t99)) z.push_back(*zi);
    CHECK(ks_uniform_test(z).p_value < 0.01);

    // sign-reversed: marginally calibrated (mean forecast cdf matches
    // N(0, sqrt 2)) yet fails the PIT pp-plot
    Dist truth_marginal = Dist::normal(0.0, std::sqrt(2.0));
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        double mean_cdf = 0.0;
        for (const auto& p : reversed) mean_cdf += p.forecast.cdf(x);
        mean_cdf /= static_cast<double>(reversed.size());
        CHECK(std::fabs(mean_cdf - truth_marginal.cdf(x)) < 0.01);
    }
    auto rev_pp = combined_ratio_curve(reversed, kNegInf, grid);
    CHECK(sup_distance(rev_pp) > 0.05);

    // climatological: diagnostics on the diagonal
    double t9 = observation_quantile(clim, 0.9);
    CHECK(sup_distance(combined_ratio_curve(clim, t9, grid)) < 0.02);
    CHECK(sup_distance(combined_ratio_curve(clim, kNegInf, grid)) < 0.01);
    CHECK(sup_distance(combined_ratio_curve(ideal, t9, grid)) < 0.02);
}

TEST_CASE("gpd pair diagnostics") {
    auto grid = default_u_grid();

    // matched shape and scale: everything on the diagonal
    auto matched = gen_gpd_pair(100000, 88, 0.25, 0.25, 1.0);
    const auto& mp = matched.streams[0].pairs;
    double t = observation_quantile(mp, 0.9);
    CHECK(sup_distance(combined_ratio_curve(mp, t, grid)) < 0.02);

    // mismatched shape: the occurrence ratio follows the analytic survival
    // ratio (1 + t/4)^-4 / exp(-t) and diverges from one
    auto mis = gen_gpd_pair(100000, 89, 0.25, 0.0, 1.0);
    const auto& xp = mis.streams[0].pairs;
    for (double tt : {2.0, 6.0}) {
        double expected = std::pow(1.0 + tt / 4.0, -4.0) / std::exp(-tt);
        double got = occurrence_ratio(xp, tt);
        CHECK(std::fabs(got / expected - 1.0) < 0.1);
    }
    CHECK(occurrence_ratio(xp, 6.0) > 5.0);

    // mismatched scale: severity drifts off the diagonal at high thresholds
    auto scale = gen_gpd_pair(1000000, 90, 0.25, 0.25, 1.2);
    const auto& sp = scale.streams[0].pairs;
    double t9 = observation_quantile(sp, 0.9);
    std::vector<double> z;
    for (const auto& p : sp)
        if (auto zi = excess_pit(p, t9)) z.push_back(*zi);
    CHECK(ks_uniform_test(z).p_value < 1e-3);
}

TEST_CASE("scenario dispatch and parameter validation") {
    CHECK_THROWS_AS(generate({"no-such-scenario", 10, 1, {}}), domain_error);
    CHECK_THROWS_AS(gen_exponential_trio(10, 1, -0.5, 1.4), parameter_error);
    CHECK_THROWS_AS(gen_optimistic(0, 1, 0.25), parameter_error);
    ScenarioSpec spec{"gpd-pair", 50, 1, {{"xi", 0.1}, {"eta", 0.1}, {"sigma_f", 2.0}}};
    auto result = generate(spec);
    const auto& f = std::get<Dist::Gpd>(result.streams[0].pairs[0].forecast.node());
    CHECK(f.sigma == 2.0);
    CHECK(f.xi == 0.1);
}
