#pragma once

// Empirical tail-calibration diagnostics computed from a finite sample of
// forecast-observation pairs: excess PITs, combined/occurrence/severity
// ratios, binned variants, supremum distances, and the marginal tail curve.
//
// All operations are pure functions of their inputs. Reductions run in a
// fixed order with compensated summation, so results do not depend on any
// parallel schedule. Randomized PITs for atomic forecasts draw per-pair
// uniforms from substreams keyed by (seed, pair index).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailcal/dists.hpp"

namespace tailcal {

struct ForecastObservationPair {
    Dist forecast;
    double observation = 0.0;
    // named covariates for binning (small; typically 0-2 entries)
    std::vector<std::pair<std::string, double>> covariates;
    // per-pair adaptive threshold; when present it replaces the global t
    std::optional<double> threshold_override;

    std::optional<double> covariate(std::string_view name) const {
        for (const auto& [k, v] : covariates)
            if (k == name) return v;
        return std::nullopt;
    }
};

using Pairs = std::span<const ForecastObservationPair>;

enum class CurveKind { combined, severity, marginal };
enum class SeriesKind { occurrence, sup_distance };

struct DiagnosticCurve {
    std::vector<double> u_grid;
    std::vector<double> values;
    std::vector<double> lower, upper;  // optional pointwise CI band
    CurveKind kind = CurveKind::combined;
    double threshold = 0.0;
    std::size_t n_exceedances = 0;
    bool degenerate = false;  // set instead of computing when a bin is empty

    bool has_band() const { return !lower.empty(); }
};

struct RatioSeries {
    std::vector<double> thresholds;
    std::vector<double> values;
    std::vector<double> lower, upper;
    std::vector<std::size_t> n_exceedances;
    SeriesKind kind = SeriesKind::occurrence;

    bool has_band() const { return !lower.empty(); }
};

// Marginal tail diagnostic over an x-grid: the empirical conditional excess
// cdf of the observations (left) against the mean forecast excess cdf over
// the exceedances (right).
struct MarginalTailCurve {
    std::vector<double> x_grid;
    std::vector<double> left, right, abs_diff;
    double threshold = 0.0;
    std::size_t n_exceedances = 0;
    double sup_distance = 0.0;
};

// Stratification of pair indices into J disjoint bins, either by explicit
// index sets or by breakpoints (or quantile terciles etc.) of a covariate.
class BinPartition {
public:
    static BinPartition explicit_sets(std::vector<std::vector<std::size_t>> sets);
    static BinPartition by_covariate(std::string name, std::vector<double> breakpoints);
    // equal-frequency bins from the empirical quantiles of the covariate
    static BinPartition by_covariate_quantiles(std::string name, std::size_t bins);

    std::size_t bins() const;
    // Resolve to index sets over the given pairs; validates disjointness.
    std::vector<std::vector<std::size_t>> assign(Pairs pairs) const;

private:
    std::vector<std::vector<std::size_t>> sets_;
    std::string covariate_;
    std::vector<double> breakpoints_;
    std::size_t quantile_bins_ = 0;
};

// u in {0, 0.01, ..., 1}; the default resolution for all curves.
std::vector<double> default_u_grid(std::size_t points = 101);

// Excess PIT of one pair at threshold t: F_t(y - t) under the forecast's
// conditional excess distribution. Returns nullopt when y <= t. t = -inf
// yields the ordinary PIT. Atomic forecasts require the uniform
// randomizer v.
std::optional<double> excess_pit(const ForecastObservationPair& pair, double t,
                                 std::optional<double> v = std::nullopt);

struct CurveOptions {
    // seed for the per-pair randomizers used with atomic forecasts
    std::optional<std::uint64_t> randomizer_seed;
};

DiagnosticCurve combined_ratio_curve(Pairs pairs, double t, std::span<const double> u_grid,
                                     const CurveOptions& opts = {});

double occurrence_ratio(Pairs pairs, double t);
RatioSeries occurrence_ratio_series(Pairs pairs, std::span<const double> thresholds);

DiagnosticCurve severity_pp_curve(Pairs pairs, double t, std::span<const double> u_grid,
                                  const CurveOptions& opts = {});

std::vector<DiagnosticCurve> binned_combined_ratio(Pairs pairs, const BinPartition& partition,
                                                   double t, std::span<const double> u_grid,
                                                   const CurveOptions& opts = {});

// max over the grid of |value(u) - u|
double sup_distance(const DiagnosticCurve& curve);

MarginalTailCurve marginal_tail_curve(Pairs pairs, double t, std::span<const double> x_grid,
                                      const CurveOptions& opts = {});

// Left-continuous empirical quantile of the observations, for expressing
// thresholds as quantile levels.
double observation_quantile(Pairs pairs, double level);

}  // namespace tailcal
