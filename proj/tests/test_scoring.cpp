#include "doctest.h"

#include <cmath>

#include "tailcal/emos.hpp"
#include "tailcal/optim.hpp"
#include "tailcal/random.hpp"
#include "tailcal/scoring.hpp"

using namespace tailcal;

TEST_CASE("CRPS closed forms and quadrature") {
    // single member: |x - y|
    CHECK(crps(Dist::ensemble({2.0}), 3.5) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(crps(Dist::ensemble({2.0}), 2.0) == doctest::Approx(0.0));

    // integral of (x - 1)^2 over [0, 1]
    CHECK(crps(Dist::uniform(0.0, 1.0), 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-7));

    // 0.5 * (0 + 1) - (1/8) * 2 = 0.25
    CHECK(crps(Dist::ensemble({0.0, 1.0}), 0.0) == doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(crps(Dist::gpd(1.0, 1.0), 0.5), divergent_score_error);
    CHECK_THROWS_AS(crps(Dist::gpd(1.0, 1.5), 0.5), divergent_score_error);
}

TEST_CASE("quadrature matches the ensemble closed form on step cdfs") {
    Rng rng(123);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> members;
        int m = 2 + static_cast<int>(rng.next() * 8);
        for (int i = 0; i < m; ++i) members.push_back(-2.0 + 5.0 * rng.next());
        Dist ens = Dist::ensemble(members);
        double y = -3.0 + 7.0 * rng.next();
        CHECK(crps_quadrature(ens, y) == doctest::Approx(crps(ens, y)).epsilon(1e-6));
    }
}

TEST_CASE("CRPS is nonnegative across families") {
    Rng rng(321);
    for (int rep = 0; rep < 30; ++rep) {
        Dist d = rep % 3 == 0   ? Dist::normal(rng.next(), 0.5 + rng.next())
                 : rep % 3 == 1 ? Dist::gpd(0.5 + rng.next(), 0.8 * rng.next())
                                : Dist::censored_below(Dist::logistic(rng.next(), 0.5), 0.0);
        double y = -1.0 + 4.0 * rng.next();
        CHECK(crps(d, y) >= 0.0);
    }
}

TEST_CASE("expected score of the uniform against itself is 1/6") {
    // direct integration: E[ y^3/3 + (1-y)^3/3 ] over y ~ U(0,1) equals 1/6
    Dist u = Dist::uniform(0.0, 1.0);
    auto est = expected_score(u, u, 20000, 7);
    CHECK(std::fabs(est.mean - 1.0 / 6.0) < 3.0 * est.std_error);
    CHECK(est.std_error > 0.0);
}

TEST_CASE("standard error scales like 1/sqrt(n)") {
    Dist f = Dist::gpd(1.0, 0.25);
    Dist g = Dist::gpd(1.0, 0.3);
    auto small = expected_score(f, g, 2000, 11);
    auto large = expected_score(f, g, 8000, 11);
    double ratio = small.std_error / large.std_error;
    CHECK(ratio > 2.0 * 0.8);
    CHECK(ratio < 2.0 * 1.2);
}

TEST_CASE("propriety spot-check") {
    Rng rng(55);
    auto random_dist = [&]() {
        switch (static_cast<int>(rng.next() * 4)) {
            case 0: return Dist::normal(-1.0 + 2.0 * rng.next(), 0.5 + rng.next());
            case 1: return Dist::exponential(0.5 + rng.next());
            case 2: return Dist::gamma(1.0 + 2.0 * rng.next(), 0.5 + rng.next());
            default: return Dist::gpd(0.5 + rng.next(), 0.7 * rng.next());
        }
    };
    for (int rep = 0; rep < 50; ++rep) {
        Dist g = random_dist();
        Dist f = random_dist();
        auto self = expected_score(g, g, 1500, 600 + rep);
        auto cross = expected_score(f, g, 1500, 600 + rep);
        double se = std::hypot(self.std_error, cross.std_error);
        CHECK(self.mean <= cross.mean + 3.0 * se);
    }
}

TEST_CASE("mixture insensitivity") {
    Dist g = Dist::gpd(1.0, 0.25);
    Dist h = Dist::gpd(1.0, 0.5);
    std::vector<double> lambdas{0.5, 0.1, 0.01, 0.0};
    auto rows = mixture_insensitivity_check(g, h, lambdas, 4000, 99);
    REQUIRE(rows.size() == 4);

    // gap exactly zero at lambda = 0
    CHECK(rows[3].gap == 0.0);

    // gaps shrink toward zero along the grid
    CHECK(rows[0].gap > rows[1].gap);
    CHECK(rows[1].gap > rows[2].gap);
    CHECK(rows[2].gap > rows[3].gap);

    // the mixture inequality holds at every lambda
    for (const auto& r : rows) CHECK(r.inequality_within_3se);
}

TEST_CASE("nelder-mead basics") {
    auto quadratic = [](const std::vector<double>& x) {
        double a = x[0] - 1.5, b = x[1] + 0.5;
        return a * a + 3.0 * b * b;
    };
    auto res = nelder_mead(quadratic, {0.0, 0.0}, {0.5, 0.5}, 2000);
    CHECK(res.converged);
    CHECK(std::fabs(res.x[0] - 1.5) < 1e-4);
    CHECK(std::fabs(res.x[1] + 0.5) < 1e-4);
    CHECK(res.evals <= 2000);

    auto zero_budget = nelder_mead(quadratic, {3.0, 4.0}, {0.5, 0.5}, 0);
    CHECK_FALSE(zero_budget.converged);
    CHECK(zero_budget.x == std::vector<double>{3.0, 4.0});
    CHECK(zero_budget.evals == 0);
}

TEST_CASE("emos objective is row-order invariant") {
    Rng rng(202);
    std::vector<EmosRow> rows;
    for (int i = 0; i < 60; ++i) {
        double m = rng.next() * 3.0, s = 0.5 + rng.next();
        double y = std::max(0.0, Dist::logistic(m, 1.0).sample(rng));
        rows.push_back({m, s, y});
    }
    EmosModel model;
    model.a = 0.1;
    model.b = 0.9;
    model.c = 1.1;
    model.d = 0.05;
    double forward = emos_objective(rows, model);
    std::reverse(rows.begin(), rows.end());
    double backward = emos_objective(rows, model);
    CHECK(forward == backward);
}

TEST_CASE("emos fit smoke recovery") {
    // truth: y ~ Logistic(m, 1) censored at zero; expect (a,b,c,d) near
    // (0, 1, 1, 0)
    Rng rng(303);
    std::vector<EmosRow> rows;
    for (int i = 0; i < 400; ++i) {
        double m = 2.0 * rng.next() + 0.5, s = 0.5 + rng.next();
        double y = std::max(0.0, Dist::logistic(m, 1.0).sample(rng));
        rows.push_back({m, s, y});
    }
    EmosModel model = emos_fit(rows, EmosModel::Family::censored_logistic, {}, 1200);
    CHECK(std::fabs(model.a - 0.0) < 0.3);
    CHECK(std::fabs(model.b - 1.0) < 0.3);
    CHECK(std::fabs(model.c - 1.0) < 0.3);
    CHECK(std::fabs(model.d - 0.0) < 0.3);

    Dist f = model.predict(1.0, 0.7);
    CHECK(f.family() == Dist::Family::censored_below);
}

TEST_CASE("emos error contracts") {
    std::vector<EmosRow> few{{1.0, 1.0, 0.5}};
    CHECK_THROWS_AS(emos_fit(few, EmosModel::Family::censored_logistic, {}, 100),
                    insufficient_data_error);

    std::vector<EmosRow> flat;
    for (int i = 0; i < 20; ++i) flat.push_back({1.0, 0.0, 0.5});
    CHECK_THROWS_AS(emos_fit(flat, EmosModel::Family::censored_logistic, {}, 100),
                    degenerate_predictor_error);

    std::vector<EmosRow> ok;
    Rng rng(404);
    for (int i = 0; i < 20; ++i) ok.push_back({rng.next(), 0.5 + rng.next(), rng.next()});
    EmosInit bad;
    bad.c = -1.0;
    CHECK_THROWS_AS(emos_fit(ok, EmosModel::Family::censored_logistic, bad, 100),
                    initialization_error);

    // budget zero: the initial coefficients come back flagged unconverged
    EmosInit init;
    init.a = 0.25;
    EmosModel frozen = emos_fit(ok, EmosModel::Family::censored_logistic, init, 0);
    CHECK_FALSE(frozen.converged);
    CHECK(frozen.a == 0.25);
    CHECK(frozen.evals == 0);
}

TEST_CASE("emos model json round trip") {
    EmosModel m;
    m.family = EmosModel::Family::censored_gev;
    m.a = 0.125;
    m.b = 1.75;
    m.c = 0.9;
    m.d = 0.3;
    m.gev_shape = 0.11;
    m.censor_point = 0.0;
    m.converged = true;
    EmosModel back = EmosModel::from_json(m.to_json());
    CHECK(back.family == m.family);
    CHECK(back.a == m.a);
    CHECK(back.b == m.b);
    CHECK(back.c == m.c);
    CHECK(back.d == m.d);
    CHECK(back.gev_shape == m.gev_shape);
    CHECK(back.converged);
    CHECK_THROWS_AS(EmosModel::from_json("not json"), parse_error);
}
