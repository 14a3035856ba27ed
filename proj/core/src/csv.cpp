#include "tailcal/csv.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "tailcal/grammar.hpp"

namespace tailcal {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open for writing: " + path.string());
    return out;
}

void write_comments(std::ofstream& out, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
}

}  // namespace

void write_curve_csv(const std::filesystem::path& path, const DiagnosticCurve& curve,
                     const std::vector<std::string>& comments) {
    auto out = open_out(path);
    write_comments(out, comments);
    out << "u,value,lower,upper,n_exceedances\n";
    for (std::size_t i = 0; i < curve.u_grid.size(); ++i) {
        out << format_double(curve.u_grid[i]) << ',' << format_double(curve.values[i]) << ',';
        if (curve.has_band())
            out << format_double(curve.lower[i]) << ',' << format_double(curve.upper[i]);
        else
            out << ',';
        out << ',' << curve.n_exceedances << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, const RatioSeries& series,
                      const std::vector<std::string>& comments) {
    auto out = open_out(path);
    write_comments(out, comments);
    out << "t,value,lower,upper,n_exceedances\n";
    for (std::size_t i = 0; i < series.thresholds.size(); ++i) {
        out << format_double(series.thresholds[i]) << ',' << format_double(series.values[i])
            << ',';
        if (series.has_band())
            out << format_double(series.lower[i]) << ',' << format_double(series.upper[i]);
        else
            out << ',';
        out << ',' << series.n_exceedances[i] << '\n';
    }
}

void write_marginal_csv(const std::filesystem::path& path, const MarginalTailCurve& curve,
                        const std::vector<std::string>& comments) {
    auto out = open_out(path);
    write_comments(out, comments);
    out << "x,left,right,abs_diff,n_exceedances\n";
    for (std::size_t i = 0; i < curve.x_grid.size(); ++i) {
        out << format_double(curve.x_grid[i]) << ',' << format_double(curve.left[i]) << ','
            << format_double(curve.right[i]) << ',' << format_double(curve.abs_diff[i]) << ','
            << curve.n_exceedances << '\n';
    }
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw error("CSV: no column named '" + name + "'");
}

CsvTable read_csv_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open CSV: " + path.string());
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
            table.comments.push_back(line.substr(start));
            continue;
        }
        std::vector<std::string> cells;
        {
            std::string cell;
            std::istringstream ss(line);
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (!line.empty() && line.back() == ',') cells.push_back("");
        }
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : cells) {
            if (cell.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            } else {
                try {
                    row.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    std::ostringstream os;
                    os << path.string() << ":" << lineno << ": cell '" << cell
                       << "' is not a number";
                    throw parse_error(os.str());
                }
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw parse_error("CSV has no header: " + path.string());
    return table;
}

}  // namespace tailcal
