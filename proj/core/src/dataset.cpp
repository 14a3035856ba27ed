#include "tailcal/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tailcal/grammar.hpp"

namespace tailcal {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& msg) {
    std::ostringstream os;
    os << path.string() << ":" << line << ": " << msg;
    throw parse_error(os.str());
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::vector<ForecastObservationPair> read_csv_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) fail(path, 1, "empty CSV dataset");
    ++lineno;
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "y")
        fail(path, lineno, "CSV dataset must start with a 'y' column");

    std::vector<ForecastObservationPair> pairs;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            fail(path, lineno, "row has " + std::to_string(cells.size()) +
                                   " cells, header has " + std::to_string(header.size()));
        std::vector<double> values(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                values[i] = std::stod(cells[i]);
            } catch (const std::exception&) {
                fail(path, lineno, "cell '" + cells[i] + "' is not a number");
            }
        }
        std::vector<double> members(values.begin() + 1, values.end());
        if (members.empty()) fail(path, lineno, "no ensemble members");
        pairs.push_back({Dist::ensemble(std::move(members)), values[0], {}, std::nullopt});
    }
    return pairs;
}

}  // namespace

std::vector<ForecastObservationPair> read_dataset(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw parse_error("dataset file not found: " + path.string());
    if (path.extension() == ".csv") return read_csv_dataset(path);

    std::ifstream in(path);
    std::vector<ForecastObservationPair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) fail(path, lineno, "invalid JSON record");
        if (!rec.is_object()) fail(path, lineno, "record must be a JSON object");
        if (!rec.contains("y") || !rec["y"].is_number())
            fail(path, lineno, "record needs a numeric 'y'");
        if (!rec.contains("forecast")) fail(path, lineno, "record needs a 'forecast'");

        ForecastObservationPair pair{Dist::uniform(0.0, 1.0), 0.0, {}, std::nullopt};
        pair.observation = rec["y"].get<double>();
        if (!std::isfinite(pair.observation)) fail(path, lineno, "'y' must be finite");

        const auto& fc = rec["forecast"];
        try {
            if (fc.is_string()) {
                pair.forecast = parse_dist(fc.get<std::string>());
            } else if (fc.is_array()) {
                std::vector<double> members;
                for (const auto& m : fc) {
                    if (!m.is_number()) fail(path, lineno, "ensemble members must be numbers");
                    members.push_back(m.get<double>());
                }
                pair.forecast = Dist::ensemble(std::move(members));
            } else {
                fail(path, lineno, "'forecast' must be a spec string or a member array");
            }
        } catch (const parse_error& e) {
            fail(path, lineno, e.what());
        } catch (const parameter_error& e) {
            fail(path, lineno, e.what());
        }

        if (rec.contains("covariates")) {
            if (!rec["covariates"].is_object())
                fail(path, lineno, "'covariates' must be an object");
            for (const auto& [key, value] : rec["covariates"].items()) {
                if (!value.is_number())
                    fail(path, lineno, "covariate '" + key + "' must be a number");
                pair.covariates.emplace_back(key, value.get<double>());
            }
        }
        if (rec.contains("threshold")) {
            if (!rec["threshold"].is_number())
                fail(path, lineno, "'threshold' must be a number");
            pair.threshold_override = rec["threshold"].get<double>();
            if (!std::isfinite(*pair.threshold_override))
                fail(path, lineno, "'threshold' must be finite");
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

void write_dataset(const std::filesystem::path& path, Pairs pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open for writing: " + path.string());
    for (const auto& p : pairs) {
        nlohmann::ordered_json rec;
        rec["y"] = p.observation;
        rec["forecast"] = format_dist(p.forecast);
        if (!p.covariates.empty()) {
            nlohmann::ordered_json covs;
            for (const auto& [k, v] : p.covariates) covs[k] = v;
            rec["covariates"] = std::move(covs);
        }
        if (p.threshold_override) rec["threshold"] = *p.threshold_override;
        out << rec.dump() << '\n';
    }
}

}  // namespace tailcal
