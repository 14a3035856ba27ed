#include "tailcal/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "tailcal/math.hpp"
#include "tailcal/random.hpp"

namespace tailcal {

namespace {

constexpr double kQuadTol = 1e-8;
constexpr double kTailCut = 1e-8;

bool first_moment_finite(const Dist& d) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Dist::Gpd> || std::is_same_v<T, Dist::Gev>) {
                return n.xi < 1.0;
            } else if constexpr (std::is_same_v<T, Dist::Mixture>) {
                return first_moment_finite(*n.first) && first_moment_finite(*n.second);
            } else if constexpr (std::is_same_v<T, Dist::Shifted> ||
                                 std::is_same_v<T, Dist::Scaled>) {
                return first_moment_finite(*n.base);
            } else if constexpr (std::is_same_v<T, Dist::CensoredBelow>) {
                return first_moment_finite(*n.base);
            } else if constexpr (std::is_same_v<T, Dist::Piecewise>) {
                return first_moment_finite(*n.above);
            } else {
                return true;
            }
        },
        d.node());
}

template <class F>
double adaptive_simpson(const F& f, double a, double fa, double b, double fb, double m,
                        double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

double ensemble_crps(const std::vector<double>& sorted, double y) {
    auto m = static_cast<double>(sorted.size());
    math::KahanSum dev;
    for (double x : sorted) dev.add(std::fabs(x - y));
    // sum_{i<j} (x_(j) - x_(i)) via prefix sums
    math::KahanSum spread;
    math::KahanSum prefix;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        spread.add(static_cast<double>(j) * sorted[j] - prefix.value());
        prefix.add(sorted[j]);
    }
    return dev.value() / m - spread.value() / (m * m);
}

}  // namespace

double crps_quadrature(const Dist& dist, double y) {
    auto integrand = [&dist, y](double x) {
        double f = dist.cdf(x);
        double h = x >= y ? 1.0 : 0.0;
        double e = f - h;
        return e * e;
    };

    double lo = dist.quantile(kTailCut);
    double hi = dist.quantile(1.0 - kTailCut);
    lo = std::min(lo, y);
    hi = std::max(hi, y);

    std::vector<double> breaks{lo, hi};
    if (y > lo && y < hi) breaks.push_back(y);
    for (double a : dist.atoms())
        if (a > lo && a < hi) breaks.push_back(a);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    double total_width = hi - lo;
    math::KahanSum sum;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = breaks[i], b = breaks[i + 1];
        double tol = total_width > 0.0 ? kQuadTol * ((b - a) / total_width) : kQuadTol;
        sum.add(integrate(integrand, a, b, std::max(tol, 1e-13)));
    }

    // survival-form tail corrections beyond the truncation quantiles
    double support_lo = dist.lower();
    if (support_lo < lo) {
        double w = std::max(1.0, 0.125 * std::max(total_width, 1.0));
        double edge = lo;
        for (int k = 0; k < 60; ++k) {
            double next = std::max(support_lo, edge - w);
            if (!(next < edge)) break;
            double piece = integrate([&](double x) { double f = dist.cdf(x); return f * f; },
                                     next, edge, 1e-11);
            sum.add(piece);
            if (piece < 1e-10 || next == support_lo) break;
            edge = next;
            w *= 2.0;
        }
    }
    double support_hi = dist.upper();
    if (support_hi > hi) {
        double w = std::max(1.0, 0.125 * std::max(total_width, 1.0));
        double edge = hi;
        for (int k = 0; k < 60; ++k) {
            double next = std::min(support_hi, edge + w);
            if (!(next > edge) || std::isinf(next)) {
                if (std::isinf(next)) next = edge + w;
                else break;
            }
            double piece = integrate(
                [&](double x) {
                    double s = 1.0 - dist.cdf(x);
                    return s * s;
                },
                edge, next, 1e-11);
            sum.add(piece);
            if (piece < 1e-10) break;
            edge = next;
            w *= 2.0;
        }
    }

    return std::max(0.0, sum.value());
}

double crps(const Dist& dist, double y) {
    if (!std::isfinite(y)) throw domain_error("crps: observation must be finite");
    if (!first_moment_finite(dist))
        throw divergent_score_error("crps: forecast has no finite first absolute moment");
    if (dist.family() == Dist::Family::ensemble) {
        const auto& e = std::get<Dist::Ensemble>(dist.node());
        return ensemble_crps(e.sorted, y);
    }
    return crps_quadrature(dist, y);
}

ScoreEstimate expected_score(const Dist& forecast, const Dist& truth, std::size_t n,
                             std::uint64_t seed) {
    if (n == 0) throw insufficient_data_error("expected_score: n must be positive");
    Rng rng(seed);
    math::KahanSum sum, sumsq;
    for (std::size_t i = 0; i < n; ++i) {
        double s = crps(forecast, truth.sample(rng));
        sum.add(s);
        sumsq.add(s * s);
    }
    double dn = static_cast<double>(n);
    ScoreEstimate est;
    est.n = n;
    est.mean = sum.value() / dn;
    if (n > 1) {
        double var = (sumsq.value() / dn - est.mean * est.mean) * dn / (dn - 1.0);
        est.std_error = std::sqrt(std::max(0.0, var) / dn);
    }
    return est;
}

std::vector<MixtureInsensitivityRow> mixture_insensitivity_check(
    const Dist& g, const Dist& h, std::span<const double> lambda_grid, std::size_t n,
    std::uint64_t seed) {
    if (n < 2) throw insufficient_data_error("mixture check: n must be at least 2");
    for (double l : lambda_grid)
        if (!(l >= 0.0 && l < 1.0)) throw domain_error("mixture check: lambda outside [0, 1)");

    // shared samples: score differences are paired for variance reduction
    Rng rng_g = Rng::substream(seed, 0);
    std::vector<double> yg(n);
    for (auto& y : yg) y = g.sample(rng_g);
    Rng rng_h = Rng::substream(seed, 1);
    std::vector<double> yh(n);
    for (auto& y : yh) y = h.sample(rng_h);

    std::vector<double> crps_g_on_g(n);
    for (std::size_t i = 0; i < n; ++i) crps_g_on_g[i] = crps(g, yg[i]);

    math::KahanSum base_sum, base_sq;
    for (std::size_t i = 0; i < n; ++i) {
        double d = crps(g, yh[i]) - crps(h, yh[i]);
        base_sum.add(d);
        base_sq.add(d * d);
    }
    double dn = static_cast<double>(n);
    double base_mean = base_sum.value() / dn;
    double base_var = (base_sq.value() / dn - base_mean * base_mean) * dn / (dn - 1.0);
    double base_se = std::sqrt(std::max(0.0, base_var) / dn);

    std::vector<MixtureInsensitivityRow> rows;
    for (double lambda : lambda_grid) {
        Dist f_lambda = Dist::mixture(lambda, h, g);
        math::KahanSum dsum, dsq;
        for (std::size_t i = 0; i < n; ++i) {
            double d = crps(f_lambda, yg[i]) - crps_g_on_g[i];
            dsum.add(d);
            dsq.add(d * d);
        }
        double mean = dsum.value() / dn;
        double var = (dsq.value() / dn - mean * mean) * dn / (dn - 1.0);

        MixtureInsensitivityRow row;
        row.lambda = lambda;
        row.gap = std::fabs(mean);
        row.gap_se = std::sqrt(std::max(0.0, var) / dn);
        double factor = lambda / (1.0 - lambda);
        row.bound = factor * std::fabs(base_mean);
        row.bound_se = factor * base_se;
        double slack = 3.0 * std::hypot(row.gap_se, row.bound_se);
        row.inequality_within_3se = row.gap <= row.bound + slack;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace tailcal
