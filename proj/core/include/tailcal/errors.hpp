#pragma once

// Error taxonomy shared by all modules. Every failure mode named in an
// operation contract has its own type so callers (and tests) can match on it.

#include <stdexcept>
#include <string>

namespace tailcal {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// invalid distribution parameters (scale <= 0, empty ensemble, ...)
struct parameter_error : error {
    using error::error;
};

// argument outside an operation's domain (e.g. quantile level not in (0,1])
struct domain_error : error {
    using error::error;
};

// excess PIT of an atomic forecast requested without a uniform randomizer
struct missing_randomizer_error : error {
    using error::error;
};

// sum of forecast exceedance probabilities is (numerically) zero
struct degenerate_denominator_error : error {
    using error::error;
};

// no observation exceeds the threshold where at least one is required
struct empty_exceedance_error : error {
    using error::error;
};

struct insufficient_data_error : error {
    using error::error;
};

// binomial null with success probability exactly 0 or 1
struct degenerate_null_error : error {
    using error::error;
};

// CRPS requested for a forecast without a finite first absolute moment
struct divergent_score_error : error {
    using error::error;
};

// EMOS training set with constant (zero-spread) ensembles
struct degenerate_predictor_error : error {
    using error::error;
};

// non-finite objective at the optimizer's starting point
struct initialization_error : error {
    using error::error;
};

// malformed distribution spec string or dataset file; message carries
// file:line context where available
struct parse_error : error {
    using error::error;
};

}  // namespace tailcal
