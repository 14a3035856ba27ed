#pragma once

// Pointwise confidence intervals for the ratio diagnostics via the CLT and
// delta method, plus the two hypothesis tests used alongside them: an exact
// binomial test for the occurrence ratio and a Kolmogorov-Smirnov test for
// uniformity of excess PITs. Pure functions; moment accumulation runs in a
// fixed order for determinism.

#include <cstdint>
#include <span>
#include <string>

#include "tailcal/diagnostics.hpp"

namespace tailcal {

struct CiResult {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    // set when the plug-in variance vanished and the interval collapsed
    bool degenerate = false;
};

struct TestReport {
    std::string kind;
    double statistic = 0.0;
    double p_value = 0.0;
    std::size_t n = 0;
    std::string null_description;

    std::string to_json() const;
};

// CI for the occurrence ratio at threshold t. Identical to
// delta_ci_combined at u = 1 by construction.
CiResult delta_ci_occurrence(Pairs pairs, double t, double level);

// CI for the combined ratio at (t, u).
CiResult delta_ci_combined(Pairs pairs, double t, double u, double level,
                           const CurveOptions& opts = {});

// CI for the severity ratio at (t, u); plug-in variance p1 (p - p1) / p^3.
CiResult delta_ci_severity(Pairs pairs, double t, double u, double level,
                           const CurveOptions& opts = {});

// Attach pointwise bands to already-computed diagnostics.
void attach_band(DiagnosticCurve& curve, Pairs pairs, double level,
                 const CurveOptions& opts = {});
void attach_band(RatioSeries& series, Pairs pairs, double level);

// Two-sided KS test of the sample against Unif(0, 1); asymptotic p-value.
TestReport ks_uniform_test(std::span<const double> values);

// Exact two-sided binomial test of the exceedance count against
// Binomial(n, mean forecast exceedance probability), minimum-likelihood
// tail convention.
TestReport binomial_occurrence_test(Pairs pairs, double t);

}  // namespace tailcal
