#pragma once

// Seeded generators for the synthetic forecaster constructions used to
// exercise the tail-calibration diagnostics. Identical ScenarioSpec values
// (including the seed) produce bitwise-identical pairs. Generation is
// chunked with per-chunk substreams derived from (seed, chunk index), so
// output depends only on pair indices, never on scheduling.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tailcal/diagnostics.hpp"

namespace tailcal::simlab {

struct ScenarioSpec {
    std::string name;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    // scenario-specific parameters; unknown keys are rejected
    std::map<std::string, double> params;
};

struct NamedStream {
    std::string name;
    std::vector<ForecastObservationPair> pairs;
};

struct ScenarioResult {
    std::vector<NamedStream> streams;
    // analytic marginal law of the observations
    std::string marginal_law;
    std::function<double(double)> marginal_cdf;
};

// Dispatch by scenario name: exponential-trio, misinformed, tail-unfocused,
// uniform-unfocused, nonrandom-tailmatch, optimistic, normal-quartet,
// gpd-pair.
ScenarioResult generate(const ScenarioSpec& spec);

std::vector<std::string> scenario_names();

// Observations Y | D ~ Exp(D) with D ~ Gamma(1/gamma, rate 1/gamma), so the
// marginal of Y is GPD(1, gamma). Streams: ideal Exp(D), climatological
// GPD(1, gamma), extremist Exp(D/nu). One (D, Y) realization is shared by
// all three streams; covariate "delta".
ScenarioResult gen_exponential_trio(std::size_t n, std::uint64_t seed, double gamma,
                                    double nu);

// Independent D1, D2 ~ Gamma(1/gamma, rate 1/gamma); Y | D1 ~ Exp(D1);
// forecast Exp(D2). Covariates "delta1", "delta2".
ScenarioResult gen_misinformed(std::size_t n, std::uint64_t seed, double gamma);

// Y ~ Exp(1); tau = +/-1 equiprobable; forecast is the cdf of Y + a_tau
// with a_tau = log((2 + tau)/2). Covariate "tau".
ScenarioResult gen_tail_unfocused(std::size_t n, std::uint64_t seed);

// Y ~ Unif(0,1); forecast (G(y) + G(y + tau))/2 with G uniform, i.e.
// Unif(-1,1) or Unif(0,2). Covariate "tau".
ScenarioResult gen_uniform_unfocused(std::size_t n, std::uint64_t seed);

// Y ~ GPD(1, 1/4); deterministic forecast spliced from a shifted
// GPD(4/5, 1/4) below 5 and GPD(1, 1/4) above.
ScenarioResult gen_nonrandom_tailmatch(std::size_t n, std::uint64_t seed);

// D ~ Gamma(1/gamma, rate 1/gamma); X | D ~ Exp(D); L ~ GPD(1, gamma/2)
// independent; Y = middle order statistic of (X, 2X, L); forecast Exp(D).
// Covariate "delta".
ScenarioResult gen_optimistic(std::size_t n, std::uint64_t seed, double gamma);

// mu ~ N(0,1); Y | mu ~ N(mu,1). Streams: ideal N(mu,1), climatological
// N(0, sqrt 2), unfocused mixture of N(mu,1) and N(mu+tau,1), sign-reversed
// N(-mu,1). Covariates "mu", "tau".
ScenarioResult gen_normal_quartet(std::size_t n, std::uint64_t seed);

// Y ~ GPD(1, xi); deterministic forecast GPD(sigma_f, eta).
ScenarioResult gen_gpd_pair(std::size_t n, std::uint64_t seed, double xi, double eta,
                            double sigma_f);

}  // namespace tailcal::simlab
