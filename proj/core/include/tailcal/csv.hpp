#pragma once

// CSV output for diagnostic curves and ratio series. Columns are
// (u or t or x, value, lower, upper, n_exceedances); band cells are left
// empty when no confidence band was computed. Leading '#' lines carry the
// threshold echo and other context.

#include <filesystem>
#include <string>
#include <vector>

#include "tailcal/diagnostics.hpp"

namespace tailcal {

void write_curve_csv(const std::filesystem::path& path, const DiagnosticCurve& curve,
                     const std::vector<std::string>& comments = {});
void write_series_csv(const std::filesystem::path& path, const RatioSeries& series,
                      const std::vector<std::string>& comments = {});
void write_marginal_csv(const std::filesystem::path& path, const MarginalTailCurve& curve,
                        const std::vector<std::string>& comments = {});

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // empty cells read as NaN

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv_table(const std::filesystem::path& path);

}  // namespace tailcal
