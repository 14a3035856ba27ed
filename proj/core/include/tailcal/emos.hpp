#pragma once

// CRPS-minimizing EMOS: location a + b * (ensemble mean), scale
// c * (1 + ensemble sd)^d, censored-logistic or censored-GEV response.
// Fitting works on (a, b, log c, d [, shape]) so the scale stays positive
// without constraints; the stored coefficients are (a, b, c, d).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tailcal/dists.hpp"

namespace tailcal {

struct EmosRow {
    double mean = 0.0;  // ensemble mean
    double sd = 0.0;    // ensemble standard deviation
    double y = 0.0;     // verifying observation
};

struct EmosModel {
    enum class Family { censored_logistic, censored_gev };

    Family family = Family::censored_logistic;
    double a = 0.0, b = 1.0;  // location = a + b * mean
    double c = 1.0, d = 0.0;  // scale = c * (1 + sd)^d
    double gev_shape = 0.0;   // censored_gev only
    double censor_point = 0.0;
    bool converged = false;
    std::size_t evals = 0;

    double location(double mean) const { return a + b * mean; }
    double scale(double sd) const;
    Dist predict(double mean, double sd) const;

    std::string to_json() const;
    static EmosModel from_json(const std::string& text);
};

struct EmosInit {
    double a = 0.0, b = 1.0, c = 1.0, d = 0.0;
    double gev_shape = 0.1;
    double censor_point = 0.0;
};

// Minimizes the mean CRPS over the training rows with Nelder-Mead. The
// budget caps objective evaluations; budget 0 returns the initial
// coefficients with converged = false. The objective sums per-row scores in
// a canonical order, so permuting the rows cannot change the fit.
EmosModel emos_fit(std::span<const EmosRow> training, EmosModel::Family family,
                   const EmosInit& init = {}, std::size_t budget = 4000);

// Mean CRPS of a coefficient vector on the training set (exposed for tests).
double emos_objective(std::span<const EmosRow> training, const EmosModel& model);

}  // namespace tailcal
