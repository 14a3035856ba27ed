#include "tailcal/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tailcal/grammar.hpp"
#include "tailcal/math.hpp"
#include "tailcal/random.hpp"

namespace tailcal {

namespace {

constexpr double kDenomCutoff = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw domain_error("confidence level outside (0, 1)");
    return math::norm_quantile(0.5 + 0.5 * level);
}

double effective_threshold(const ForecastObservationPair& p, double t) {
    return p.threshold_override ? *p.threshold_override : t;
}

// Delta-method CI for mean(a) / mean(b) with plug-in covariance.
CiResult ratio_ci(std::span<const double> a, std::span<const double> b, double z) {
    std::size_t n = a.size();
    if (n < 2) throw insufficient_data_error("delta CI: need at least two pairs");
    math::KahanSum sa, sb, saa, sbb, sab;
    for (std::size_t i = 0; i < n; ++i) {
        sa.add(a[i]);
        sb.add(b[i]);
        saa.add(a[i] * a[i]);
        sbb.add(b[i] * b[i]);
        sab.add(a[i] * b[i]);
    }
    double dn = static_cast<double>(n);
    double ma = sa.value() / dn;
    double mb = sb.value() / dn;
    if (mb < kDenomCutoff) throw degenerate_denominator_error("delta CI: zero denominator");
    double vaa = saa.value() / dn - ma * ma;
    double vbb = sbb.value() / dn - mb * mb;
    double vab = sab.value() / dn - ma * mb;

    double g1 = 1.0 / mb;
    double g2 = -ma / (mb * mb);
    double var = g1 * g1 * vaa + 2.0 * g1 * g2 * vab + g2 * g2 * vbb;

    CiResult out;
    out.estimate = ma / mb;
    if (!(var > 0.0)) {
        out.lower = out.upper = out.estimate;
        out.degenerate = true;
        return out;
    }
    double half = z * std::sqrt(var / dn);
    out.lower = out.estimate - half;
    out.upper = out.estimate + half;
    return out;
}

// numerator indicators 1{z_i <= u, y_i > t_i} and denominators 1 - F_i(t_i)
void combined_terms(Pairs pairs, double t, double u, const CurveOptions& opts,
                    std::vector<double>& a, std::vector<double>& b) {
    a.resize(pairs.size());
    b.resize(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        double ti = effective_threshold(p, t);
        b[i] = ti == kNegInf ? 1.0 : 1.0 - p.forecast.cdf(ti);
        std::optional<double> v;
        if (!p.forecast.continuous()) {
            if (!opts.randomizer_seed)
                throw missing_randomizer_error(
                    "delta CI: atomic forecast requires a randomizer seed");
            Rng rng = Rng::substream(*opts.randomizer_seed, i);
            v = rng.next();
        }
        auto z = excess_pit(p, ti, v);
        a[i] = (z && *z <= u) ? 1.0 : 0.0;
    }
}

}  // namespace

std::string TestReport::to_json() const {
    std::ostringstream os;
    os << "{\"kind\": \"" << kind << "\", \"statistic\": " << format_double(statistic)
       << ", \"p_value\": " << format_double(p_value) << ", \"n\": " << n
       << ", \"null\": \"" << null_description << "\"}";
    return os.str();
}

CiResult delta_ci_occurrence(Pairs pairs, double t, double level) {
    double z = check_level(level);
    std::vector<double> a(pairs.size()), b(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        double ti = effective_threshold(p, t);
        a[i] = p.observation > ti ? 1.0 : 0.0;
        b[i] = ti == kNegInf ? 1.0 : 1.0 - p.forecast.cdf(ti);
    }
    return ratio_ci(a, b, z);
}

CiResult delta_ci_combined(Pairs pairs, double t, double u, double level,
                           const CurveOptions& opts) {
    double z = check_level(level);
    std::vector<double> a, b;
    combined_terms(pairs, t, u, opts, a, b);
    return ratio_ci(a, b, z);
}

CiResult delta_ci_severity(Pairs pairs, double t, double u, double level,
                           const CurveOptions& opts) {
    double z = check_level(level);
    if (pairs.size() < 2) throw insufficient_data_error("delta CI: need at least two pairs");
    std::vector<double> a, b;
    combined_terms(pairs, t, u, opts, a, b);
    math::KahanSum sa;
    std::size_t exceed = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        sa.add(a[i]);
        if (pairs[i].observation > effective_threshold(pairs[i], t)) ++exceed;
    }
    double dn = static_cast<double>(pairs.size());
    double p1 = sa.value() / dn;
    double p = static_cast<double>(exceed) / dn;
    if (p <= 0.0) throw empty_exceedance_error("severity CI: no exceedances");

    CiResult out;
    out.estimate = p1 / p;
    double var = p1 * (p - p1) / (p * p * p);
    if (!(var > 0.0)) {
        out.lower = out.upper = out.estimate;
        out.degenerate = true;
        return out;
    }
    double half = z * std::sqrt(var / dn);
    out.lower = out.estimate - half;
    out.upper = out.estimate + half;
    return out;
}

void attach_band(DiagnosticCurve& curve, Pairs pairs, double level, const CurveOptions& opts) {
    curve.lower.clear();
    curve.upper.clear();
    for (double u : curve.u_grid) {
        CiResult ci = curve.kind == CurveKind::severity
                          ? delta_ci_severity(pairs, curve.threshold, u, level, opts)
                          : delta_ci_combined(pairs, curve.threshold, u, level, opts);
        curve.lower.push_back(ci.lower);
        curve.upper.push_back(ci.upper);
    }
}

void attach_band(RatioSeries& series, Pairs pairs, double level) {
    series.lower.clear();
    series.upper.clear();
    for (double t : series.thresholds) {
        CiResult ci = delta_ci_occurrence(pairs, t, level);
        series.lower.push_back(ci.lower);
        series.upper.push_back(ci.upper);
    }
}

TestReport ks_uniform_test(std::span<const double> values) {
    if (values.empty()) throw insufficient_data_error("KS test: empty sample");
    std::vector<double> x(values.begin(), values.end());
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0))
            throw domain_error("KS test: sample values must lie in [0, 1]");
    std::sort(x.begin(), x.end());
    double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double di = static_cast<double>(i);
        d = std::max(d, std::max((di + 1.0) / n - x[i], x[i] - di / n));
    }
    TestReport report;
    report.kind = "ks_uniform";
    report.statistic = d;
    report.p_value = math::kolmogorov_q(std::sqrt(n) * d);
    report.n = x.size();
    report.null_description = "excess PITs i.i.d. Unif(0,1)";
    return report;
}

TestReport binomial_occurrence_test(Pairs pairs, double t) {
    if (pairs.empty()) throw insufficient_data_error("binomial test: no pairs");
    long long n = static_cast<long long>(pairs.size());
    long long k = 0;
    math::KahanSum psum;
    for (const auto& p : pairs) {
        double ti = effective_threshold(p, t);
        psum.add(ti == kNegInf ? 1.0 : 1.0 - p.forecast.cdf(ti));
        if (p.observation > ti) ++k;
    }
    double pbar = psum.value() / static_cast<double>(n);
    if (!(pbar > 0.0) || !(pbar < 1.0))
        throw degenerate_null_error("binomial test: mean exceedance probability is 0 or 1");

    // two-sided exact p-value: sum the probabilities of all outcomes no more
    // likely than the observed count (minimum-likelihood tail convention)
    const double log_tol = std::log1p(1e-7);
    double log_pk = math::binom_log_pmf(k, n, pbar);
    auto mode = static_cast<long long>(std::floor((static_cast<double>(n) + 1.0) * pbar));
    mode = std::clamp<long long>(mode, 0, n);

    double p_value;
    if (k == mode && math::binom_log_pmf(mode, n, pbar) <= log_pk + log_tol) {
        p_value = 1.0;
    } else {
        // pmf is nondecreasing on [0, mode] and nonincreasing on [mode, n];
        // binary-search the boundary of {pmf <= pmf(k)} on each flank
        auto included_left = [&](long long j) {
            return math::binom_log_pmf(j, n, pbar) <= log_pk + log_tol;
        };
        long long lo = -1;
        {
            long long a = 0, b = mode;
            // largest j in [0, mode) with pmf(j) <= pmf(k)
            while (a < b) {
                long long mid = a + (b - a) / 2;
                if (included_left(mid))
                    a = mid + 1;
                else
                    b = mid;
            }
            lo = a - 1;
        }
        long long hi = n + 1;
        {
            long long a = mode, b = n + 1;
            // smallest j in (mode, n] with pmf(j) <= pmf(k)
            while (a < b) {
                long long mid = a + (b - a) / 2;
                if (included_left(mid))
                    b = mid;
                else
                    a = mid + 1;
            }
            hi = a;
        }
        double left = lo >= 0 ? math::binom_cdf(lo, n, pbar) : 0.0;
        double right = hi <= n ? 1.0 - math::binom_cdf(hi - 1, n, pbar) : 0.0;
        p_value = std::min(1.0, left + right);
    }

    TestReport report;
    report.kind = "binomial_occurrence";
    report.statistic = static_cast<double>(k);
    report.p_value = p_value;
    report.n = pairs.size();
    std::ostringstream os;
    os << "exceedance count ~ Binomial(n, " << format_double(pbar) << ")";
    report.null_description = os.str();
    return report;
}

}  // namespace tailcal
