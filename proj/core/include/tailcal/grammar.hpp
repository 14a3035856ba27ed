#pragma once

// Distribution spec grammar used in dataset files and on the CLI:
//   family(p1=v1, p2=v2, ...)   with nesting for wrappers, e.g.
//   censored_below(logistic(mu=1.2, s=0.8), at=0)
//   ensemble(1.2, 3.4, ...)
// Numbers are printed with the shortest round-trip representation, so
// parse/print round trips are bit-exact.

#include <string>
#include <string_view>

#include "tailcal/dists.hpp"

namespace tailcal {

Dist parse_dist(std::string_view spec);
std::string format_dist(const Dist& d);

// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

}  // namespace tailcal
