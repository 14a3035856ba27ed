#pragma once

// CRPS computation and Monte-Carlo expected-score machinery, including the
// mixture-insensitivity experiment that shows proper scores missing tail
// differences that the calibration diagnostics catch.

#include <cstdint>
#include <span>
#include <vector>

#include "tailcal/dists.hpp"

namespace tailcal {

struct ScoreEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// CRPS(F, y) = integral of (F(x) - 1{y <= x})^2 dx. Ensembles use the exact
// closed form; everything else adaptive quadrature with absolute tolerance
// 1e-8, split at y and at atoms, truncated at the 1e-8 quantiles with a
// survival-form tail correction. Throws divergent_score_error when the
// forecast lacks a finite first absolute moment (GPD/GEV shape >= 1).
double crps(const Dist& dist, double y);

// Generic quadrature path, exposed so step cdfs can be cross-checked
// against the ensemble closed form.
double crps_quadrature(const Dist& dist, double y);

// Monte-Carlo estimate of E_G[ CRPS(F, Y) ], Y ~ G.
ScoreEstimate expected_score(const Dist& forecast, const Dist& truth, std::size_t n,
                             std::uint64_t seed);

// One row per lambda: the expected-score gap of the contaminated forecast
// F_lambda = lambda H + (1 - lambda) G against the bound from the mixture
// inequality (lambda/(1-lambda)) |S(G,H) - S(H,H)|. Gaps and bounds are
// paired-difference estimates on shared samples.
struct MixtureInsensitivityRow {
    double lambda = 0.0;
    double gap = 0.0;       // |S(F_lambda, G) - S(G, G)|
    double gap_se = 0.0;
    double bound = 0.0;     // (lambda/(1-lambda)) |S(G, H) - S(H, H)|
    double bound_se = 0.0;
    bool inequality_within_3se = false;
};

std::vector<MixtureInsensitivityRow> mixture_insensitivity_check(
    const Dist& g, const Dist& h, std::span<const double> lambda_grid, std::size_t n,
    std::uint64_t seed);

}  // namespace tailcal
