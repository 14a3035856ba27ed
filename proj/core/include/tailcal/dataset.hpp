#pragma once

// Dataset files: JSON-lines records {"y": ..., "forecast": "<spec>" or
// [members], "covariates": {...}, "threshold": ...}; CSV accepted for
// ensemble-only datasets with columns y, m1..mK. Written files are
// byte-stable for identical inputs.

#include <filesystem>
#include <vector>

#include "tailcal/diagnostics.hpp"

namespace tailcal {

std::vector<ForecastObservationPair> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, Pairs pairs);

}  // namespace tailcal
