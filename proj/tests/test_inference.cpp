#include "doctest.h"

#include <cmath>

#include "tailcal/inference.hpp"
#include "tailcal/math.hpp"
#include "tailcal/random.hpp"
#include "tailcal/simlab.hpp"

using namespace tailcal;

namespace {

// n pairs with forecast Unif(0, 2) (so 1 - F(1) = 0.5 for every pair) of
// which k exceed t = 1
std::vector<ForecastObservationPair> half_dataset(int n, int k) {
    std::vector<ForecastObservationPair> pairs;
    for (int i = 0; i < n; ++i)
        pairs.push_back({Dist::uniform(0.0, 2.0), i < k ? 1.5 : 0.5, {}, {}});
    return pairs;
}

}  // namespace

TEST_CASE("occurrence CI with a deterministic forecast") {
    // var[F(t)] = 0 and zero covariate term, so the variance collapses to
    // Ghat (1 - Ghat) / (1 - F(t))^2
    auto pairs = half_dataset(10, 3);
    auto ci = delta_ci_occurrence(pairs, 1.0, 0.95);
    double ghat = 0.7;  // 7 of 10 at or below t
    double expected_var = ghat * (1.0 - ghat) / (0.5 * 0.5);
    double half = math::norm_quantile(0.975) * std::sqrt(expected_var / 10.0);
    CHECK(ci.estimate == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(ci.upper - ci.estimate == doctest::Approx(half).epsilon(1e-12));
    CHECK(ci.estimate - ci.lower == doctest::Approx(half).epsilon(1e-12));

    CHECK_THROWS_AS(delta_ci_occurrence(half_dataset(1, 0), 1.0, 0.95),
                    insufficient_data_error);
    CHECK_THROWS_AS(delta_ci_occurrence(pairs, 1.0, 1.5), domain_error);
}

TEST_CASE("combined CI matches hand-computed moments on the trio dataset") {
    std::vector<ForecastObservationPair> pairs{{Dist::uniform(0.0, 1.0), 0.2, {}, {}},
                                               {Dist::uniform(0.0, 1.0), 0.6, {}, {}},
                                               {Dist::uniform(0.0, 1.0), 0.9, {}, {}}};
    auto ci = delta_ci_combined(pairs, 0.5, 0.5, 0.95);
    // a = (0, 1, 0) (only y = 0.6 has excess PIT 0.2 <= 0.5), b = 0.5 each:
    // estimate (1/3)/(1/2), variance 4 * var(a) = 4 * 2/9
    CHECK(ci.estimate == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    double var = 4.0 * (2.0 / 9.0);
    double half = math::norm_quantile(0.975) * std::sqrt(var / 3.0);
    CHECK(ci.upper - ci.estimate == doctest::Approx(half).epsilon(1e-12));
}

TEST_CASE("combined CI at u = 1 is the occurrence CI") {
    Rng rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<ForecastObservationPair> pairs;
        int n = 10 + static_cast<int>(rng.next() * 50);
        for (int i = 0; i < n; ++i) {
            Dist f = Dist::gamma(1.0 + rng.next(), 1.0);
            pairs.push_back({f, f.sample(rng) * (0.8 + 0.4 * rng.next()), {}, {}});
        }
        double t = observation_quantile(pairs, 0.6);
        auto occ = delta_ci_occurrence(pairs, t, 0.9);
        auto comb = delta_ci_combined(pairs, t, 1.0, 0.9);
        CHECK(std::fabs(occ.estimate - comb.estimate) < 1e-12);
        CHECK(std::fabs(occ.lower - comb.lower) < 1e-12);
        CHECK(std::fabs(occ.upper - comb.upper) < 1e-12);
    }
}

TEST_CASE("combined CI with no small excess PITs collapses") {
    auto pairs = half_dataset(10, 5);  // excess PITs all 0.5
    auto ci = delta_ci_combined(pairs, 1.0, 0.1, 0.95);
    CHECK(ci.estimate == 0.0);
    CHECK(ci.lower == 0.0);
    CHECK(ci.upper == 0.0);
    CHECK(ci.degenerate);
}

TEST_CASE("severity CI plug-in variance") {
    // p1 = 0.25, p = 0.5  ->  variance 0.25 * 0.25 / 0.125 = 0.5
    // forecasts Unif(0,2), t = 1: exceedances 1.25 (z = 0.25) and 1.75 (z = 0.75)
    std::vector<ForecastObservationPair> pairs{{Dist::uniform(0.0, 2.0), 1.25, {}, {}},
                                               {Dist::uniform(0.0, 2.0), 1.75, {}, {}},
                                               {Dist::uniform(0.0, 2.0), 0.5, {}, {}},
                                               {Dist::uniform(0.0, 2.0), 0.3, {}, {}}};
    auto ci = delta_ci_severity(pairs, 1.0, 0.5, 0.95);
    CHECK(ci.estimate == doctest::Approx(0.5));
    double half = math::norm_quantile(0.975) * std::sqrt(0.5 / 4.0);
    CHECK(ci.upper - ci.estimate == doctest::Approx(half).epsilon(1e-12));

    // u = 1: the interval collapses at 1
    auto at_one = delta_ci_severity(pairs, 1.0, 1.0, 0.95);
    CHECK(at_one.estimate == 1.0);
    CHECK(at_one.degenerate);
    CHECK(at_one.lower == 1.0);
    CHECK(at_one.upper == 1.0);

    CHECK_THROWS_AS(delta_ci_severity(half_dataset(4, 0), 1.0, 0.5, 0.95),
                    empty_exceedance_error);
}

TEST_CASE("CI half-width scales like 1/sqrt(n)") {
    auto small = simlab::gen_exponential_trio(2500, 7, 0.25, 1.4);
    auto large = simlab::gen_exponential_trio(10000, 7, 0.25, 1.4);
    double t = 3.113;  // near the 0.9 quantile of GPD(1, 1/4)
    auto ci_small = delta_ci_occurrence(small.streams[0].pairs, t, 0.95);
    auto ci_large = delta_ci_occurrence(large.streams[0].pairs, t, 0.95);
    double ratio = (ci_small.upper - ci_small.lower) / (ci_large.upper - ci_large.lower);
    CHECK(ratio > 2.0 * 0.85);
    CHECK(ratio < 2.0 * 1.15);
}

TEST_CASE("KS statistic") {
    std::vector<double> single{0.5};
    auto r1 = ks_uniform_test(single);
    CHECK(r1.statistic == doctest::Approx(0.5));

    // brute force over all jump points for the equispaced sample
    std::vector<double> nine;
    for (int i = 1; i <= 9; ++i) nine.push_back(0.1 * i);
    double brute = 0.0;
    for (int i = 0; i < 9; ++i) {
        brute = std::max(brute, std::fabs((i + 1) / 9.0 - nine[i]));
        brute = std::max(brute, std::fabs(nine[i] - i / 9.0));
    }
    auto r9 = ks_uniform_test(nine);
    CHECK(r9.statistic == doctest::Approx(brute).epsilon(1e-15));

    CHECK_THROWS_AS(ks_uniform_test(std::vector<double>{}), insufficient_data_error);
    CHECK_THROWS_AS(ks_uniform_test(std::vector<double>{1.2}), domain_error);
}

TEST_CASE("KS p-values under the null") {
    const int reps = 200;
    int ok = 0;
    for (int rep = 0; rep < reps; ++rep) {
        Rng rng(4000 + rep);
        std::vector<double> u(10000);
        for (auto& v : u) v = rng.next();
        if (ks_uniform_test(u).p_value > 0.01) ++ok;
    }
    CHECK(ok >= 0.98 * reps);
}

TEST_CASE("binomial occurrence test") {
    // three pairs with exceedance probability 1/2 each, all exceeding:
    // two-sided exact p = 2/8
    auto all3 = half_dataset(3, 3);
    auto r = binomial_occurrence_test(all3, 1.0);
    CHECK(r.statistic == 3.0);
    CHECK(r.p_value == doctest::Approx(0.25).epsilon(1e-12));

    // the observed count at the null mode has p-value one
    auto even = half_dataset(4, 2);
    CHECK(binomial_occurrence_test(even, 1.0).p_value == doctest::Approx(1.0));

    // degenerate null probabilities
    std::vector<ForecastObservationPair> sub{{Dist::uniform(0.0, 1.0), 0.5, {}, {}}};
    CHECK_THROWS_AS(binomial_occurrence_test(sub, 2.0), degenerate_null_error);
    CHECK_THROWS_AS(binomial_occurrence_test(
                        sub, -std::numeric_limits<double>::infinity()),
                    degenerate_null_error);
}

TEST_CASE("binomial test agrees with brute-force enumeration") {
    Rng rng(777);
    for (int rep = 0; rep < 40; ++rep) {
        int n = 2 + static_cast<int>(rng.next() * 11);
        double p = 0.1 + 0.8 * rng.next();
        int k = static_cast<int>(rng.next() * (n + 1));
        // dataset engineered to the target (n, p, k): every forecast puts
        // survival p at t = 0
        std::vector<ForecastObservationPair> pairs;
        for (int i = 0; i < n; ++i)
            pairs.push_back({Dist::uniform(-(1.0 - p) / p, 1.0), i < k ? 0.5 : -0.1, {}, {}});
        auto r = binomial_occurrence_test(pairs, 0.0);

        double pk = std::exp(math::binom_log_pmf(k, n, p));
        double brute = 0.0;
        for (int j = 0; j <= n; ++j) {
            double pj = std::exp(math::binom_log_pmf(j, n, p));
            if (pj <= pk * (1.0 + 1e-7)) brute += pj;
        }
        brute = std::min(1.0, brute);
        CHECK(r.p_value == doctest::Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("report serialization") {
    TestReport r;
    r.kind = "ks_uniform";
    r.statistic = 0.25;
    r.p_value = 0.125;
    r.n = 7;
    r.null_description = "x";
    CHECK(r.to_json() ==
          "{\"kind\": \"ks_uniform\", \"statistic\": 0.25, \"p_value\": 0.125, \"n\": 7, "
          "\"null\": \"x\"}");
}

TEST_CASE("bands attach to curves and series") {
    auto trio = simlab::gen_exponential_trio(2000, 5, 0.25, 1.4);
    const auto& pairs = trio.streams[0].pairs;
    double t = observation_quantile(pairs, 0.8);
    auto grid = default_u_grid(21);
    auto curve = combined_ratio_curve(pairs, t, grid);
    attach_band(curve, pairs, 0.95);
    REQUIRE(curve.has_band());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(curve.lower[j] <= curve.values[j] + 1e-12);
        CHECK(curve.upper[j] >= curve.values[j] - 1e-12);
    }
    auto series = occurrence_ratio_series(pairs, std::vector<double>{t});
    attach_band(series, pairs, 0.95);
    REQUIRE(series.has_band());
    CHECK(series.lower[0] < series.values[0]);
    CHECK(series.upper[0] > series.values[0]);
}
