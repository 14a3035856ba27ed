#pragma once

// Special functions and numeric helpers. Everything here is dependency-free
// and deterministic; tolerances are fixed at compile time.

#include <cstddef>
#include <vector>

namespace tailcal::math {

// Standard normal cdf, Phi(x) = erfc(-x/sqrt(2))/2.
double norm_cdf(double x);

// Standard normal quantile. Rational initial approximation refined by one
// Halley step against norm_cdf; absolute error well below 1e-9.
double norm_quantile(double p);

// Regularized lower incomplete gamma P(a, x). Series for x < a+1,
// continued fraction otherwise; absolute tolerance 1e-12 or better.
double gammp(double a, double x);

// Upper tail Q(a, x) = 1 - P(a, x).
double gammq(double a, double x);

// Inverse of gammp in x for fixed a: returns x with P(a, x) = p.
double inv_gammp(double a, double p);

// Regularized incomplete beta I_x(a, b) via continued fraction.
double betai(double a, double b, double x);

// Binomial cdf P(X <= k) for X ~ Binomial(n, p), exact via betai.
double binom_cdf(long long k, long long n, double p);

// log of the Binomial(n, p) pmf at k.
double binom_log_pmf(long long k, long long n, double p);

// Asymptotic Kolmogorov survival Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2),
// truncated when terms drop below 1e-12; clamped to [0, 1].
double kolmogorov_q(double lambda);

// Compensated (Kahan) accumulator; deterministic for a fixed input order.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Order statistic at quantile level u in (0, 1]: the ceil(u*n)-th smallest
// value (left-continuous generalized inverse of the empirical cdf).
double empirical_quantile(std::vector<double> values, double u);

}  // namespace tailcal::math
