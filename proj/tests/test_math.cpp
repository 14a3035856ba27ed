#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tailcal/errors.hpp"
#include "tailcal/math.hpp"
#include "tailcal/random.hpp"

using namespace tailcal;

TEST_CASE("normal cdf and quantile") {
    CHECK(math::norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // classical two-sided 5% critical value
    CHECK(math::norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(math::norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(math::norm_cdf(math::norm_quantile(0.123456)) ==
          doctest::Approx(0.123456).epsilon(1e-12));

    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        double u = rng.next();
        CHECK(std::fabs(math::norm_cdf(math::norm_quantile(u)) - u) < 1e-12);
    }
    CHECK(std::isinf(math::norm_quantile(1.0)));
    CHECK_THROWS_AS(math::norm_quantile(1.5), domain_error);
}

TEST_CASE("regularized incomplete gamma") {
    // P(1, x) = 1 - exp(-x)
    CHECK(math::gammp(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    // P(1/2, x) = erf(sqrt(x))
    CHECK(math::gammp(0.5, 1.0) == doctest::Approx(std::erf(1.0)).epsilon(1e-13));
    CHECK(math::gammp(0.5, 4.0) == doctest::Approx(std::erf(2.0)).epsilon(1e-13));
    CHECK(math::gammp(2.0, 0.0) == 0.0);
    CHECK(math::gammq(3.0, 2.5) == doctest::Approx(1.0 - math::gammp(3.0, 2.5)).epsilon(1e-14));

    Rng rng(22);
    for (int i = 0; i < 500; ++i) {
        double a = 0.2 + 8.0 * rng.next();
        double p = rng.next();
        double x = math::inv_gammp(a, p);
        CHECK(std::fabs(math::gammp(a, x) - p) < 1e-11);
    }
}

TEST_CASE("incomplete beta and binomial cdf") {
    // I_x(1, 1) = x and I_x(2, 1) = x^2
    CHECK(math::betai(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-13));
    CHECK(math::betai(2.0, 1.0, 0.37) == doctest::Approx(0.37 * 0.37).epsilon(1e-12));

    // brute-force binomial cdf oracle
    auto brute = [](long long k, long long n, double p) {
        double sum = 0.0;
        for (long long j = 0; j <= k; ++j) sum += std::exp(math::binom_log_pmf(j, n, p));
        return sum;
    };
    Rng rng(33);
    for (int i = 0; i < 50; ++i) {
        long long n = 1 + static_cast<long long>(rng.next() * 30);
        double p = 0.05 + 0.9 * rng.next();
        long long k = static_cast<long long>(rng.next() * static_cast<double>(n + 1));
        CHECK(math::binom_cdf(k, n, p) == doctest::Approx(brute(k, n, p)).epsilon(1e-10));
    }
}

TEST_CASE("asymptotic Kolmogorov survival") {
    // classical critical values of the Kolmogorov distribution
    CHECK(math::kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(2e-3));
    CHECK(math::kolmogorov_q(1.2238) == doctest::Approx(0.10).epsilon(2e-3));
    CHECK(math::kolmogorov_q(1.6276) == doctest::Approx(0.01).epsilon(2e-2));
    CHECK(math::kolmogorov_q(0.0) == 1.0);
    CHECK(math::kolmogorov_q(10.0) < 1e-12);

    // alternative Jacobi-theta form of the same distribution as a second route
    auto theta_form = [](double lambda) {
        double sum = 0.0;
        for (int k = 1; k <= 100; k += 2) {
            double term = std::exp(-std::pow(std::numbers::pi * k, 2) / (8.0 * lambda * lambda));
            sum += term;
            if (term < 1e-16) break;
        }
        return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
    };
    for (double lambda : {0.6, 0.9, 1.2, 1.8}) {
        CHECK(math::kolmogorov_q(lambda) == doctest::Approx(theta_form(lambda)).epsilon(1e-9));
    }

    // decreasing in the statistic
    double prev = 1.0;
    for (double lambda = 0.2; lambda < 3.0; lambda += 0.1) {
        double q = math::kolmogorov_q(lambda);
        CHECK(q <= prev + 1e-15);
        prev = q;
    }
}

TEST_CASE("empirical quantile uses the left-continuous inverse") {
    CHECK(math::empirical_quantile({5.0, 1.0, 3.0}, 0.5) == 3.0);
    CHECK(math::empirical_quantile({5.0, 1.0, 3.0}, 1.0 / 3.0) == 1.0);
    CHECK(math::empirical_quantile({5.0, 1.0, 3.0}, 1.0) == 5.0);
    CHECK_THROWS_AS(math::empirical_quantile({}, 0.5), insufficient_data_error);
    CHECK_THROWS_AS(math::empirical_quantile({1.0}, 0.0), domain_error);
}

TEST_CASE("substreams differ and are reproducible") {
    Rng a = Rng::substream(42, 0);
    Rng b = Rng::substream(42, 1);
    Rng a2 = Rng::substream(42, 0);
    bool all_equal = true;
    for (int i = 0; i < 100; ++i) {
        double x = a.next(), y = b.next(), x2 = a2.next();
        CHECK(x == x2);
        if (x != y) all_equal = false;
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    CHECK_FALSE(all_equal);
}
