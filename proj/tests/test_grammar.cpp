#include "doctest.h"

#include <cmath>

#include "tailcal/grammar.hpp"
#include "tailcal/random.hpp"

using namespace tailcal;

TEST_CASE("parse specific specs") {
    Dist d = parse_dist("censored_below(logistic(mu=1.2, s=0.8), at=0)");
    CHECK(d.family() == Dist::Family::censored_below);
    CHECK(d.cdf(0.0) == doctest::Approx(1.0 / (1.0 + std::exp(1.2 / 0.8))).epsilon(1e-14));

    Dist e = parse_dist("ensemble(1.2, 3.4, 0.5)");
    CHECK(e.cdf(1.2) == doctest::Approx(2.0 / 3.0));

    Dist m = parse_dist("mixture(normal(mu=0, sigma=1), gpd(sigma=1, xi=0.25), lambda=0.3)");
    CHECK(m.family() == Dist::Family::mixture);

    // whitespace is irrelevant
    CHECK(format_dist(parse_dist(" gpd( sigma = 1 , xi = 0.25 ) ")) ==
          "gpd(sigma=1, xi=0.25)");
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_dist("cauchy(x0=0, gamma=1)"), parse_error);
    CHECK_THROWS_AS(parse_dist("normal(mu=0)"), parse_error);
    CHECK_THROWS_AS(parse_dist("normal(mu=0, sigma=1) trailing"), parse_error);
    CHECK_THROWS_AS(parse_dist("normal(mu=0, sigma=1, sigma=2)"), parse_error);
    CHECK_THROWS_AS(parse_dist("ensemble()"), parse_error);
    CHECK_THROWS_AS(parse_dist("normal(mu=zero, sigma=1)"), parse_error);
    // valid syntax, invalid parameters
    CHECK_THROWS_AS(parse_dist("normal(mu=0, sigma=-1)"), parameter_error);
}

namespace {

Dist random_dist(Rng& rng, int depth = 0) {
    int pick = static_cast<int>(rng.next() * (depth > 1 ? 8 : 13));
    double a = -3.0 + 6.0 * rng.next();
    double s = 0.1 + 3.0 * rng.next();
    switch (pick) {
        case 0: return Dist::normal(a, s);
        case 1: return Dist::uniform(a, a + s);
        case 2: return Dist::exponential(s);
        case 3: return Dist::gamma(s, 0.5 + rng.next());
        case 4: return Dist::logistic(a, s);
        case 5: return Dist::gpd(s, -0.8 + 1.6 * rng.next());
        case 6: return Dist::gev(a, s, -0.8 + 1.6 * rng.next());
        case 7: {
            std::vector<double> members;
            int m = 1 + static_cast<int>(rng.next() * 6);
            for (int i = 0; i < m; ++i) members.push_back(-3.0 + 6.0 * rng.next());
            return Dist::ensemble(members);
        }
        case 8:
            return Dist::mixture(rng.next(), random_dist(rng, depth + 1),
                                 random_dist(rng, depth + 1));
        case 9: return Dist::shifted(random_dist(rng, depth + 1), a);
        case 10: return Dist::scaled(random_dist(rng, depth + 1), s);
        case 11: return Dist::censored_below(random_dist(rng, depth + 1), a);
        default: {
            Dist below = Dist::uniform(a, a + s);
            Dist above = Dist::uniform(a, a + s + 2.0 * rng.next());
            double split = a + 0.5 * s;
            return Dist::piecewise(below, above, split);
        }
    }
}

}  // namespace

TEST_CASE("print/parse round trip is bit-exact") {
    Rng rng(2024);
    int done = 0;
    while (done < 400) {
        Dist d = [&]() -> Dist {
            while (true) {
                try {
                    return random_dist(rng);
                } catch (const parameter_error&) {
                    // e.g. a decreasing piecewise splice; draw again
                }
            }
        }();
        std::string s1 = format_dist(d);
        Dist parsed = parse_dist(s1);
        std::string s2 = format_dist(parsed);
        CHECK(s1 == s2);
        // and the parsed value evaluates identically
        for (int k = 0; k < 10; ++k) {
            double x = -6.0 + 12.0 * rng.next();
            CHECK(d.cdf(x) == parsed.cdf(x));
        }
        ++done;
    }
}

TEST_CASE("doubles survive formatting exactly") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456.789e12, 0.25, -7.5e-12}) {
        Dist d = Dist::shifted(Dist::exponential(1.0), x);
        Dist back = parse_dist(format_dist(d));
        const auto& n = std::get<Dist::Shifted>(back.node());
        CHECK(n.by == x);
    }
}
