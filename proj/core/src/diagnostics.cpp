#include "tailcal/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tailcal/math.hpp"
#include "tailcal/random.hpp"

namespace tailcal {

namespace {

constexpr double kDenomCutoff = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double effective_threshold(const ForecastObservationPair& p, double t) {
    return p.threshold_override ? *p.threshold_override : t;
}

std::optional<double> randomizer_for(const ForecastObservationPair& p,
                                     const CurveOptions& opts, std::size_t index) {
    if (p.forecast.continuous()) return std::nullopt;
    if (!opts.randomizer_seed)
        throw missing_randomizer_error(
            "atomic forecast requires a randomizer seed for excess PITs");
    Rng rng = Rng::substream(*opts.randomizer_seed, index);
    return rng.next();
}

// Per-threshold tallies shared by the ratio diagnostics. The denominator is
// a fixed-order compensated sum over all pairs.
struct TailTally {
    std::vector<double> z;  // excess PITs of exceeding pairs, unsorted
    double denom = 0.0;     // sum of 1 - F_i(t_i)
    std::size_t n_exceed = 0;
    std::size_t n = 0;
};

TailTally tally(Pairs pairs, std::span<const std::size_t> indices, double t,
                const CurveOptions& opts) {
    TailTally out;
    out.n = indices.size();
    math::KahanSum denom;
    for (std::size_t idx : indices) {
        const auto& p = pairs[idx];
        double ti = effective_threshold(p, t);
        double surv = ti == kNegInf ? 1.0 : 1.0 - p.forecast.cdf(ti);
        denom.add(surv);
        auto z = excess_pit(p, ti, randomizer_for(p, opts, idx));
        if (z) {
            out.z.push_back(*z);
            ++out.n_exceed;
        }
    }
    out.denom = denom.value();
    return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

// counts of sorted z-values <= u, evaluated over the grid
std::vector<double> ecdf_counts(std::vector<double>& z, std::span<const double> u_grid) {
    std::sort(z.begin(), z.end());
    std::vector<double> counts(u_grid.size());
    for (std::size_t j = 0; j < u_grid.size(); ++j) {
        auto it = std::upper_bound(z.begin(), z.end(), u_grid[j]);
        counts[j] = static_cast<double>(it - z.begin());
    }
    return counts;
}

}  // namespace

std::vector<double> default_u_grid(std::size_t points) {
    if (points < 2) throw domain_error("u grid needs at least two points");
    std::vector<double> u(points);
    for (std::size_t i = 0; i < points; ++i)
        u[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    return u;
}

std::optional<double> excess_pit(const ForecastObservationPair& pair, double t,
                                 std::optional<double> v) {
    const Dist& f = pair.forecast;
    const double y = pair.observation;
    if (!std::isfinite(y)) throw domain_error("excess_pit: observation must be finite");
    if (!f.continuous() && !v)
        throw missing_randomizer_error("excess_pit: atomic forecast requires a randomizer v");
    if (!(y > t)) return std::nullopt;

    if (t == kNegInf) {
        double right = f.cdf(y);
        if (f.continuous()) return right;
        double left = f.cdf_left(y);
        return left + *v * (right - left);
    }

    Excess ft(f, t);
    if (ft.degenerate()) return 1.0;
    double right = ft.cdf(y - t);
    if (f.continuous()) return right;
    double left = ft.cdf_left(y - t);
    return left + *v * (right - left);
}

DiagnosticCurve combined_ratio_curve(Pairs pairs, double t, std::span<const double> u_grid,
                                     const CurveOptions& opts) {
    auto idx = all_indices(pairs.size());
    TailTally tl = tally(pairs, idx, t, opts);
    if (tl.denom < kDenomCutoff)
        throw degenerate_denominator_error(
            "combined ratio: forecast exceedance probabilities sum to zero");
    DiagnosticCurve curve;
    curve.kind = CurveKind::combined;
    curve.threshold = t;
    curve.n_exceedances = tl.n_exceed;
    curve.u_grid.assign(u_grid.begin(), u_grid.end());
    curve.values = ecdf_counts(tl.z, u_grid);
    for (auto& v : curve.values) v /= tl.denom;
    return curve;
}

double occurrence_ratio(Pairs pairs, double t) {
    math::KahanSum denom;
    std::size_t exceed = 0;
    for (const auto& p : pairs) {
        double ti = effective_threshold(p, t);
        denom.add(ti == kNegInf ? 1.0 : 1.0 - p.forecast.cdf(ti));
        if (p.observation > ti) ++exceed;
    }
    if (denom.value() < kDenomCutoff)
        throw degenerate_denominator_error(
            "occurrence ratio: forecast exceedance probabilities sum to zero");
    return static_cast<double>(exceed) / denom.value();
}

RatioSeries occurrence_ratio_series(Pairs pairs, std::span<const double> thresholds) {
    RatioSeries series;
    series.kind = SeriesKind::occurrence;
    for (double t : thresholds) {
        series.thresholds.push_back(t);
        series.values.push_back(occurrence_ratio(pairs, t));
        std::size_t exceed = 0;
        for (const auto& p : pairs)
            if (p.observation > effective_threshold(p, t)) ++exceed;
        series.n_exceedances.push_back(exceed);
    }
    return series;
}

DiagnosticCurve severity_pp_curve(Pairs pairs, double t, std::span<const double> u_grid,
                                  const CurveOptions& opts) {
    auto idx = all_indices(pairs.size());
    TailTally tl = tally(pairs, idx, t, opts);
    if (tl.n_exceed == 0)
        throw empty_exceedance_error("severity curve: no observation exceeds the threshold");
    DiagnosticCurve curve;
    curve.kind = CurveKind::severity;
    curve.threshold = t;
    curve.n_exceedances = tl.n_exceed;
    curve.u_grid.assign(u_grid.begin(), u_grid.end());
    curve.values = ecdf_counts(tl.z, u_grid);
    for (auto& v : curve.values) v /= static_cast<double>(tl.n_exceed);
    return curve;
}

std::vector<DiagnosticCurve> binned_combined_ratio(Pairs pairs, const BinPartition& partition,
                                                   double t, std::span<const double> u_grid,
                                                   const CurveOptions& opts) {
    auto sets = partition.assign(pairs);
    std::vector<DiagnosticCurve> curves;
    curves.reserve(sets.size());
    for (const auto& set : sets) {
        DiagnosticCurve curve;
        curve.kind = CurveKind::combined;
        curve.threshold = t;
        curve.u_grid.assign(u_grid.begin(), u_grid.end());
        TailTally tl = tally(pairs, set, t, opts);
        if (set.empty() || tl.denom < kDenomCutoff) {
            curve.degenerate = true;
            curve.values.assign(u_grid.size(), 0.0);
        } else {
            curve.n_exceedances = tl.n_exceed;
            curve.values = ecdf_counts(tl.z, u_grid);
            for (auto& v : curve.values) v /= tl.denom;
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

double sup_distance(const DiagnosticCurve& curve) {
    if (curve.u_grid.empty()) throw domain_error("sup_distance: empty curve");
    double d = 0.0;
    for (std::size_t i = 0; i < curve.u_grid.size(); ++i)
        d = std::max(d, std::fabs(curve.values[i] - curve.u_grid[i]));
    return d;
}

MarginalTailCurve marginal_tail_curve(Pairs pairs, double t, std::span<const double> x_grid,
                                      const CurveOptions&) {
    MarginalTailCurve out;
    out.threshold = t;
    out.x_grid.assign(x_grid.begin(), x_grid.end());

    math::KahanSum denom;
    std::vector<std::size_t> exceed_idx;
    std::vector<double> eff_t(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        eff_t[i] = effective_threshold(p, t);
        denom.add(eff_t[i] == kNegInf ? 1.0 : 1.0 - p.forecast.cdf(eff_t[i]));
        if (p.observation > eff_t[i]) exceed_idx.push_back(i);
    }
    out.n_exceedances = exceed_idx.size();
    if (exceed_idx.empty())
        throw empty_exceedance_error("marginal tail curve: no exceedances");
    if (denom.value() < kDenomCutoff)
        throw degenerate_denominator_error("marginal tail curve: zero mean exceedance");

    std::vector<Excess> excesses;
    excesses.reserve(exceed_idx.size());
    for (std::size_t i : exceed_idx) excesses.emplace_back(pairs[i].forecast, eff_t[i]);

    for (double x : x_grid) {
        std::size_t in_window = 0;
        for (std::size_t i : exceed_idx) {
            double d = pairs[i].observation - eff_t[i];
            if (d <= x) ++in_window;
        }
        double left = static_cast<double>(in_window) / denom.value();

        math::KahanSum right_sum;
        for (const auto& e : excesses) right_sum.add(e.cdf(x));
        double right = right_sum.value() / static_cast<double>(excesses.size());

        out.left.push_back(left);
        out.right.push_back(right);
        out.abs_diff.push_back(std::fabs(left - right));
        out.sup_distance = std::max(out.sup_distance, out.abs_diff.back());
    }
    return out;
}

double observation_quantile(Pairs pairs, double level) {
    std::vector<double> obs;
    obs.reserve(pairs.size());
    for (const auto& p : pairs) obs.push_back(p.observation);
    return math::empirical_quantile(std::move(obs), level);
}

BinPartition BinPartition::explicit_sets(std::vector<std::vector<std::size_t>> sets) {
    if (sets.empty()) throw domain_error("bin partition: needs at least one bin");
    BinPartition p;
    p.sets_ = std::move(sets);
    return p;
}

BinPartition BinPartition::by_covariate(std::string name, std::vector<double> breakpoints) {
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw domain_error("bin partition: breakpoints must be increasing");
    BinPartition p;
    p.covariate_ = std::move(name);
    p.breakpoints_ = std::move(breakpoints);
    return p;
}

BinPartition BinPartition::by_covariate_quantiles(std::string name, std::size_t bins) {
    if (bins == 0) throw domain_error("bin partition: needs at least one bin");
    BinPartition p;
    p.covariate_ = std::move(name);
    p.quantile_bins_ = bins;
    return p;
}

std::size_t BinPartition::bins() const {
    if (!sets_.empty()) return sets_.size();
    if (quantile_bins_ > 0) return quantile_bins_;
    return breakpoints_.size() + 1;
}

std::vector<std::vector<std::size_t>> BinPartition::assign(Pairs pairs) const {
    if (!sets_.empty()) {
        std::vector<bool> seen(pairs.size(), false);
        for (const auto& set : sets_)
            for (std::size_t i : set) {
                if (i >= pairs.size()) throw domain_error("bin partition: index out of range");
                if (seen[i]) throw domain_error("bin partition: bins are not disjoint");
                seen[i] = true;
            }
        return sets_;
    }

    std::vector<double> breaks = breakpoints_;
    if (quantile_bins_ > 0) {
        std::vector<double> values;
        values.reserve(pairs.size());
        for (const auto& p : pairs) {
            auto v = p.covariate(covariate_);
            if (!v) throw domain_error("bin partition: missing covariate '" + covariate_ + "'");
            values.push_back(*v);
        }
        breaks.clear();
        for (std::size_t j = 1; j < quantile_bins_; ++j)
            breaks.push_back(math::empirical_quantile(
                values, static_cast<double>(j) / static_cast<double>(quantile_bins_)));
    }

    std::vector<std::vector<std::size_t>> sets(breaks.size() + 1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto v = pairs[i].covariate(covariate_);
        if (!v) throw domain_error("bin partition: missing covariate '" + covariate_ + "'");
        auto bin = static_cast<std::size_t>(
            std::upper_bound(breaks.begin(), breaks.end(), *v) - breaks.begin());
        sets[bin].push_back(i);
    }
    return sets;
}

}  // namespace tailcal
