#pragma once

// Nelder-Mead simplex minimizer. Coefficients: reflection 1, expansion 2,
// contraction 0.5, shrink 0.5; one restart from the best vertex. The budget
// caps objective evaluations; budget 0 returns the start point unchanged
// with converged = false. Non-finite objective values are treated as +inf.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace tailcal {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::size_t evals = 0;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, std::vector<double> step,
                                    std::size_t budget, double diameter_tol = 1e-6) {
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    const std::size_t dim = start.size();

    NelderMeadResult result;
    result.x = start;
    if (budget == 0) return result;

    std::size_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex;
    std::vector<double> fx;
    auto build_simplex = [&](const std::vector<double>& origin) {
        simplex.assign(1, origin);
        for (std::size_t i = 0; i < dim; ++i) {
            auto v = origin;
            v[i] += step[i];
            simplex.push_back(std::move(v));
        }
        fx.resize(simplex.size());
        for (std::size_t i = 0; i < simplex.size() && evals < budget; ++i)
            fx[i] = eval(simplex[i]);
    };

    auto order = [&]() {
        // indices of best, worst, second worst
        std::size_t lo = 0, hi = 0, nh = 0;
        for (std::size_t i = 1; i < fx.size(); ++i) {
            if (fx[i] < fx[lo]) lo = i;
            if (fx[i] > fx[hi]) {
                nh = hi;
                hi = i;
            } else if (fx[i] > fx[nh] && i != hi) {
                nh = i;
            }
        }
        return std::array<std::size_t, 3>{lo, hi, nh};
    };

    auto diameter = [&]() {
        double d = 0.0;
        for (std::size_t i = 1; i < simplex.size(); ++i)
            for (std::size_t j = 0; j < dim; ++j)
                d = std::max(d, std::fabs(simplex[i][j] - simplex[0][j]));
        return d;
    };

    bool converged = false;
    int restarts_left = 1;
    build_simplex(start);

    while (evals < budget) {
        auto [lo, hi, nh] = order();
        if (diameter() < diameter_tol) {
            if (restarts_left-- > 0) {
                // restart once from the best vertex with fresh steps
                build_simplex(simplex[lo]);
                continue;
            }
            converged = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == hi) continue;
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
        }
        for (auto& c : centroid) c /= static_cast<double>(dim);

        auto blend = [&](double coeff) {
            std::vector<double> v(dim);
            for (std::size_t j = 0; j < dim; ++j)
                v[j] = centroid[j] + coeff * (simplex[hi][j] - centroid[j]);
            return v;
        };

        auto reflected = blend(-alpha);
        double fr = eval(reflected);
        if (fr < fx[lo] && evals < budget) {
            auto expanded = blend(-gamma);
            double fe = eval(expanded);
            if (fe < fr) {
                simplex[hi] = std::move(expanded);
                fx[hi] = fe;
            } else {
                simplex[hi] = std::move(reflected);
                fx[hi] = fr;
            }
        } else if (fr < fx[nh]) {
            simplex[hi] = std::move(reflected);
            fx[hi] = fr;
        } else if (evals < budget) {
            auto contracted = blend(fr < fx[hi] ? -rho : rho);
            double fc = eval(contracted);
            if (fc < std::min(fr, fx[hi])) {
                simplex[hi] = std::move(contracted);
                fx[hi] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i < simplex.size() && evals < budget; ++i) {
                    if (i == lo) continue;
                    for (std::size_t j = 0; j < dim; ++j)
                        simplex[i][j] = simplex[lo][j] + sigma * (simplex[i][j] - simplex[lo][j]);
                    fx[i] = eval(simplex[i]);
                }
            }
        }
    }

    auto [lo, hi, nh] = order();
    (void)hi;
    (void)nh;
    result.x = simplex[lo];
    result.fx = fx[lo];
    result.converged = converged;
    result.evals = evals;
    return result;
}

}  // namespace tailcal
