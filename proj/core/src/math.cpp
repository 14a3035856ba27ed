#include "tailcal/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tailcal/errors.hpp"

namespace tailcal::math {

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 1000;

// Acklam's rational approximation to the normal quantile.
double norm_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Series expansion of P(a, x) for x < a + 1.
double gamma_series(double a, double x) {
    double gln = std::lgamma(a);
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
}

// Continued fraction for Q(a, x), x >= a + 1 (modified Lentz).
double gamma_cf(double a, double x) {
    const double fpmin = std::numeric_limits<double>::min() / kEps;
    double gln = std::lgamma(a);
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    const double fpmin = std::numeric_limits<double>::min() / kEps;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double dm = static_cast<double>(m);
        double m2 = 2.0 * dm;
        double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw domain_error("norm_quantile: p must lie in [0, 1]");
    }
    double x = norm_quantile_approx(p);
    // one Halley refinement against the erfc-based cdf
    double e = norm_cdf(x) - p;
    double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double gammp(double a, double x) {
    if (!(a > 0.0)) throw domain_error("gammp: shape must be positive");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_cf(a, x);
}

double gammq(double a, double x) {
    if (!(a > 0.0)) throw domain_error("gammq: shape must be positive");
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_cf(a, x);
}

double inv_gammp(double a, double p) {
    if (!(a > 0.0)) throw domain_error("inv_gammp: shape must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("inv_gammp: p outside [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    const double gln = std::lgamma(a);
    const double a1 = a - 1.0;
    const double lna1 = a > 1.0 ? std::log(a1) : 0.0;
    const double afac = a > 1.0 ? std::exp(a1 * (lna1 - 1.0) - gln) : 0.0;
    double x;
    if (a > 1.0) {
        // Wilson-Hilferty starting point
        double pp = p < 0.5 ? p : 1.0 - p;
        double t = std::sqrt(-2.0 * std::log(pp));
        x = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) x = -x;
        x = std::max(1e-3, a * std::pow(1.0 - 1.0 / (9.0 * a) - x / (3.0 * std::sqrt(a)), 3));
    } else {
        double t = 1.0 - a * (0.253 + a * 0.12);
        if (p < t)
            x = std::pow(p / t, 1.0 / a);
        else
            x = 1.0 - std::log(1.0 - (p - t) / (1.0 - t));
    }
    for (int j = 0; j < 24; ++j) {
        if (x <= 0.0) return 0.0;
        double err = gammp(a, x) - p;
        double t;
        if (a > 1.0)
            t = afac * std::exp(-(x - a1) + a1 * (std::log(x) - lna1));
        else
            t = std::exp(-x + a1 * std::log(x) - gln);
        double u = err / t;
        // Halley step
        x -= (t = u / (1.0 - 0.5 * std::min(1.0, u * ((a - 1.0) / x - 1.0))));
        if (x <= 0.0) x = 0.5 * (x + t);
        if (std::fabs(t) < kEps * x) break;
    }
    return x;
}

double betai(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw domain_error("betai: parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    double front = std::exp(lbeta + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double binom_cdf(long long k, long long n, double p) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    return betai(static_cast<double>(n - k), static_cast<double>(k + 1), 1.0 - p);
}

double binom_log_pmf(long long k, long long n, double p) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    double dk = static_cast<double>(k);
    double dn = static_cast<double>(n);
    double lchoose =
        std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
    double lp = 0.0;
    if (k > 0) lp += dk * std::log(p);
    if (k < n) lp += (dn - dk) * std::log1p(-p);
    return lchoose + lp;
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double empirical_quantile(std::vector<double> values, double u) {
    if (values.empty()) throw insufficient_data_error("empirical_quantile: empty sample");
    if (!(u > 0.0 && u <= 1.0)) throw domain_error("empirical_quantile: level outside (0, 1]");
    std::sort(values.begin(), values.end());
    auto n = static_cast<double>(values.size());
    auto idx = static_cast<std::size_t>(std::ceil(u * n));
    idx = std::min(std::max<std::size_t>(idx, 1), values.size());
    return values[idx - 1];
}

}  // namespace tailcal::math
