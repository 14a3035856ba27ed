#include "tailcal/emos.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "tailcal/math.hpp"
#include "tailcal/optim.hpp"
#include "tailcal/scoring.hpp"
#include "tailcal/version.hpp"

namespace tailcal {

namespace {

Dist response(EmosModel::Family family, double loc, double scale, double shape,
              double censor) {
    if (family == EmosModel::Family::censored_logistic)
        return Dist::censored_below(Dist::logistic(loc, scale), censor);
    return Dist::censored_below(Dist::gev(loc, scale, shape), censor);
}

EmosModel from_vector(EmosModel::Family family, const std::vector<double>& x,
                      double censor) {
    EmosModel m;
    m.family = family;
    m.a = x[0];
    m.b = x[1];
    m.c = std::exp(x[2]);
    m.d = x[3];
    if (family == EmosModel::Family::censored_gev) m.gev_shape = x[4];
    m.censor_point = censor;
    return m;
}

}  // namespace

double EmosModel::scale(double sd) const { return c * std::pow(1.0 + sd, d); }

Dist EmosModel::predict(double mean, double sd) const {
    return response(family, location(mean), scale(sd), gev_shape, censor_point);
}

std::string EmosModel::to_json() const {
    nlohmann::ordered_json j;
    j["family"] = family == Family::censored_logistic ? "censored_logistic" : "censored_gev";
    j["a"] = a;
    j["b"] = b;
    j["c"] = c;
    j["d"] = d;
    if (family == Family::censored_gev) j["gev_shape"] = gev_shape;
    j["censor_point"] = censor_point;
    j["scale_link"] = "scale = c * (1 + sd)^d";
    j["converged"] = converged;
    j["evals"] = evals;
    j["tool_version"] = tailcal::version();
    return j.dump(2);
}

EmosModel EmosModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw parse_error("EMOS model: invalid JSON");
    EmosModel m;
    std::string family = j.at("family").get<std::string>();
    if (family == "censored_logistic")
        m.family = Family::censored_logistic;
    else if (family == "censored_gev")
        m.family = Family::censored_gev;
    else
        throw parse_error("EMOS model: unknown family '" + family + "'");
    m.a = j.at("a").get<double>();
    m.b = j.at("b").get<double>();
    m.c = j.at("c").get<double>();
    m.d = j.at("d").get<double>();
    if (m.family == Family::censored_gev) m.gev_shape = j.at("gev_shape").get<double>();
    m.censor_point = j.value("censor_point", 0.0);
    m.converged = j.value("converged", false);
    return m;
}

double emos_objective(std::span<const EmosRow> training, const EmosModel& model) {
    std::vector<double> scores;
    scores.reserve(training.size());
    for (const auto& row : training) {
        Dist f = model.predict(row.mean, row.sd);
        scores.push_back(crps(f, row.y));
    }
    // canonical summation order makes the objective row-order invariant
    std::sort(scores.begin(), scores.end());
    math::KahanSum sum;
    for (double s : scores) sum.add(s);
    return sum.value() / static_cast<double>(training.size());
}

EmosModel emos_fit(std::span<const EmosRow> training, EmosModel::Family family,
                   const EmosInit& init, std::size_t budget) {
    if (training.size() < 10)
        throw insufficient_data_error("emos_fit: need at least 10 training pairs");
    bool any_spread = false;
    for (const auto& row : training) {
        if (!(row.sd >= 0.0) || !std::isfinite(row.mean) || !std::isfinite(row.y))
            throw parameter_error("emos_fit: rows must have finite mean, sd >= 0, finite y");
        if (row.sd > 0.0) any_spread = true;
    }
    if (!any_spread)
        throw degenerate_predictor_error("emos_fit: every ensemble has zero spread");
    if (!(init.c > 0.0)) throw initialization_error("emos_fit: initial scale must be positive");

    const double censor = init.censor_point;
    const bool gev = family == EmosModel::Family::censored_gev;

    std::vector<double> x0{init.a, init.b, std::log(init.c), init.d};
    if (gev) x0.push_back(init.gev_shape);

    auto objective = [&](const std::vector<double>& x) -> double {
        try {
            return emos_objective(training, from_vector(family, x, censor));
        } catch (const error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    if (budget == 0) {
        EmosModel m = from_vector(family, x0, censor);
        m.converged = false;
        m.evals = 0;
        return m;
    }

    if (!std::isfinite(objective(x0)))
        throw initialization_error("emos_fit: objective not finite at the initial point");

    std::vector<double> step{0.2, 0.2, 0.2, 0.2};
    if (gev) step.push_back(0.05);

    NelderMeadResult res = nelder_mead(objective, x0, step, budget);
    EmosModel m = from_vector(family, res.x, censor);
    m.converged = res.converged;
    m.evals = res.evals;
    return m;
}

}  // namespace tailcal
