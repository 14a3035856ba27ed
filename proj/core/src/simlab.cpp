#include "tailcal/simlab.hpp"

#include <algorithm>
#include <cmath>

#include "tailcal/grammar.hpp"
#include "tailcal/random.hpp"

namespace tailcal::simlab {

namespace {

constexpr std::size_t kChunk = 1 << 16;

void require(bool ok, const char* msg) {
    if (!ok) throw parameter_error(msg);
}

// Runs fn(index, rng) for every index in [0, n), drawing from a substream
// keyed by (seed, chunk). fn must consume a fixed number of uniforms per
// index so chunk boundaries stay aligned.
template <class Fn>
void chunked(std::size_t n, std::uint64_t seed, Fn&& fn) {
    for (std::size_t chunk = 0; chunk * kChunk < n; ++chunk) {
        Rng rng = Rng::substream(seed, chunk);
        std::size_t end = std::min(n, (chunk + 1) * kChunk);
        for (std::size_t i = chunk * kChunk; i < end; ++i) fn(i, rng);
    }
}

double get_param(const ScenarioSpec& spec, const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

ForecastObservationPair make_pair(Dist forecast, double y,
                                  std::vector<std::pair<std::string, double>> covs) {
    ForecastObservationPair p{std::move(forecast), y, std::move(covs), std::nullopt};
    return p;
}

}  // namespace

std::vector<std::string> scenario_names() {
    return {"exponential-trio", "misinformed",      "tail-unfocused",
            "uniform-unfocused", "nonrandom-tailmatch", "optimistic",
            "normal-quartet",   "gpd-pair"};
}

ScenarioResult gen_exponential_trio(std::size_t n, std::uint64_t seed, double gamma,
                                    double nu) {
    require(n >= 1, "scenario: n must be at least 1");
    require(gamma > 0.0, "exponential trio: gamma must be positive");
    require(nu > 0.0, "exponential trio: nu must be positive");

    Dist delta_law = Dist::gamma(1.0 / gamma, gamma);  // mean 1, Laplace (1+gamma t)^(-1/gamma)
    Dist climatological = Dist::gpd(1.0, gamma);

    ScenarioResult out;
    out.streams = {{"ideal", {}}, {"climatological", {}}, {"extremist", {}}};
    for (auto& s : out.streams) s.pairs.reserve(n);

    chunked(n, seed, [&](std::size_t, Rng& rng) {
        double delta = delta_law.sample(rng);
        double y = Dist::exponential(delta).sample(rng);
        std::vector<std::pair<std::string, double>> covs{{"delta", delta}};
        out.streams[0].pairs.push_back(make_pair(Dist::exponential(delta), y, covs));
        out.streams[1].pairs.push_back(make_pair(climatological, y, covs));
        out.streams[2].pairs.push_back(
            make_pair(Dist::exponential(delta / nu), y, std::move(covs)));
    });

    out.marginal_law = format_dist(Dist::gpd(1.0, gamma));
    out.marginal_cdf = [g = Dist::gpd(1.0, gamma)](double x) { return g.cdf(x); };
    return out;
}

ScenarioResult gen_misinformed(std::size_t n, std::uint64_t seed, double gamma) {
    require(n >= 1, "scenario: n must be at least 1");
    require(gamma > 0.0, "misinformed: gamma must be positive");
    Dist delta_law = Dist::gamma(1.0 / gamma, gamma);

    ScenarioResult out;
    out.streams = {{"misinformed", {}}};
    out.streams[0].pairs.reserve(n);

    chunked(n, seed, [&](std::size_t, Rng& rng) {
        double d1 = delta_law.sample(rng);
        double d2 = delta_law.sample(rng);
        double y = Dist::exponential(d1).sample(rng);
        out.streams[0].pairs.push_back(
            make_pair(Dist::exponential(d2), y, {{"delta1", d1}, {"delta2", d2}}));
    });

    out.marginal_law = format_dist(Dist::gpd(1.0, gamma));
    out.marginal_cdf = [g = Dist::gpd(1.0, gamma)](double x) { return g.cdf(x); };
    return out;
}

ScenarioResult gen_tail_unfocused(std::size_t n, std::uint64_t seed) {
    require(n >= 1, "scenario: n must be at least 1");
    Dist unit_exp = Dist::exponential(1.0);
    Dist shift_plus = Dist::shifted(unit_exp, std::log(1.5));   // tau = +1
    Dist shift_minus = Dist::shifted(unit_exp, std::log(0.5));  // tau = -1

    ScenarioResult out;
    out.streams = {{"tail-unfocused", {}}};
    out.streams[0].pairs.reserve(n);

    chunked(n, seed, [&](std::size_t, Rng& rng) {
        double y = unit_exp.sample(rng);
        double tau = rng.next() < 0.5 ? 1.0 : -1.0;
        out.streams[0].pairs.push_back(
            make_pair(tau > 0 ? shift_plus : shift_minus, y, {{"tau", tau}}));
    });

    out.marginal_law = format_dist(unit_exp);
    out.marginal_cdf = [unit_exp](double x) { return unit_exp.cdf(x); };
    return out;
}

ScenarioResult gen_uniform_unfocused(std::size_t n, std::uint64_t seed) {
    require(n >= 1, "scenario: n must be at least 1");
    Dist truth = Dist::uniform(0.0, 1.0);
    // (G(y) + G(y + tau))/2 with G = Unif(0,1) collapses to these two
    Dist f_plus = Dist::uniform(-1.0, 1.0);  // tau = +1
    Dist f_minus = Dist::uniform(0.0, 2.0);  // tau = -1

    ScenarioResult out;
    out.streams = {{"uniform-unfocused", {}}};
    out.streams[0].pairs.reserve(n);

    chunked(n, seed, [&](std::size_t, Rng& rng) {
        double y = truth.sample(rng);
        double tau = rng.next() < 0.5 ? 1.0 : -1.0;
        out.streams[0].pairs.push_back(
            make_pair(tau > 0 ? f_plus : f_minus, y, {{"tau", tau}}));
    });

    out.marginal_law = format_dist(truth);
    out.marginal_cdf = [truth](double x) { return truth.cdf(x); };
    return out;
}

ScenarioResult gen_nonrandom_tailmatch(std::size_t n, std::uint64_t seed) {
    require(n >= 1, "scenario: n must be at least 1");
    Dist truth = Dist::gpd(1.0, 0.25);
    Dist forecast = Dist::piecewise(Dist::shifted(Dist::gpd(0.8, 0.25), 1.0),
                                    Dist::gpd(1.0, 0.25), 5.0);

    ScenarioResult out;
    out.streams = {{"nonrandom-tailmatch", {}}};
    out.streams[0].pairs.reserve(n);

    chunked(n, seed, [&](std::size_t, Rng& rng) {
        out.streams[0].pairs.push_back(make_pair(forecast, truth.sample(rng), {}));
    });

    out.marginal_law = format_dist(truth);
    out.marginal_cdf = [truth](double x) { return truth.cdf(x); };
    return out;
}

ScenarioResult gen_optimistic(std::size_t n, std::uint64_t seed, double gamma) {
    require(n >= 1, "scenario: n must be at least 1");
    require(gamma > 0.0, "optimistic: gamma must be positive");
    Dist delta_law = Dist::gamma(1.0 / gamma, gamma);
    Dist l_law = Dist::gpd(1.0, gamma / 2.0);

    ScenarioResult out;
    out.streams = {{"optimistic", {}}};
    out.streams[0].pairs.reserve(n);

    chunked(n, seed, [&](std::size_t, Rng& rng) {
        double delta = delta_law.sample(rng);
        double x = Dist::exponential(delta).sample(rng);
        double l = l_law.sample(rng);
        // second largest of (x, 2x, l): the middle order statistic
        double a = std::min(x, 2.0 * x), b = std::max(x, 2.0 * x);
        double y = std::max(a, std::min(b, l));
        out.streams[0].pairs.push_back(
            make_pair(Dist::exponential(delta), y, {{"delta", delta}}));
    });

    // lambda(y) GPD(1,g)(y) + (1 - lambda(y)) GPD(2,g)(y), lambda = GPD(1,g/2)
    Dist g1 = Dist::gpd(1.0, gamma);
    Dist g2 = Dist::gpd(2.0, gamma);
    out.marginal_law = "gpd(sigma=1, xi=" + format_double(gamma / 2.0) +
                       ")-weighted blend of " + format_dist(g1) + " and " + format_dist(g2);
    out.marginal_cdf = [lam = l_law, g1, g2](double x) {
        double w = lam.cdf(x);
        return w * g1.cdf(x) + (1.0 - w) * g2.cdf(x);
    };
    return out;
}

ScenarioResult gen_normal_quartet(std::size_t n, std::uint64_t seed) {
    require(n >= 1, "scenario: n must be at least 1");
    Dist mu_law = Dist::normal(0.0, 1.0);
    Dist climatological = Dist::normal(0.0, std::sqrt(2.0));

    ScenarioResult out;
    out.streams = {{"ideal", {}}, {"climatological", {}}, {"unfocused", {}},
                   {"sign-reversed", {}}};
    for (auto& s : out.streams) s.pairs.reserve(n);

    chunked(n, seed, [&](std::size_t, Rng& rng) {
        double mu = mu_law.sample(rng);
        double y = Dist::normal(mu, 1.0).sample(rng);
        double tau = rng.next() < 0.5 ? 1.0 : -1.0;
        std::vector<std::pair<std::string, double>> covs{{"mu", mu}, {"tau", tau}};
        out.streams[0].pairs.push_back(make_pair(Dist::normal(mu, 1.0), y, covs));
        out.streams[1].pairs.push_back(make_pair(climatological, y, covs));
        out.streams[2].pairs.push_back(make_pair(
            Dist::mixture(0.5, Dist::normal(mu, 1.0), Dist::normal(mu + tau, 1.0)), y, covs));
        out.streams[3].pairs.push_back(make_pair(Dist::normal(-mu, 1.0), y, std::move(covs)));
    });

    out.marginal_law = format_dist(climatological);
    out.marginal_cdf = [climatological](double x) { return climatological.cdf(x); };
    return out;
}

ScenarioResult gen_gpd_pair(std::size_t n, std::uint64_t seed, double xi, double eta,
                            double sigma_f) {
    require(n >= 1, "scenario: n must be at least 1");
    require(sigma_f > 0.0, "gpd pair: sigma_f must be positive");
    Dist truth = Dist::gpd(1.0, xi);
    Dist forecast = Dist::gpd(sigma_f, eta);

    ScenarioResult out;
    out.streams = {{"gpd-pair", {}}};
    out.streams[0].pairs.reserve(n);

    chunked(n, seed, [&](std::size_t, Rng& rng) {
        out.streams[0].pairs.push_back(make_pair(forecast, truth.sample(rng), {}));
    });

    out.marginal_law = format_dist(truth);
    out.marginal_cdf = [truth](double x) { return truth.cdf(x); };
    return out;
}

ScenarioResult generate(const ScenarioSpec& spec) {
    const auto& name = spec.name;
    if (name == "exponential-trio")
        return gen_exponential_trio(spec.n, spec.seed, get_param(spec, "gamma", 0.25),
                                    get_param(spec, "nu", 1.4));
    if (name == "misinformed")
        return gen_misinformed(spec.n, spec.seed, get_param(spec, "gamma", 0.25));
    if (name == "tail-unfocused") return gen_tail_unfocused(spec.n, spec.seed);
    if (name == "uniform-unfocused") return gen_uniform_unfocused(spec.n, spec.seed);
    if (name == "nonrandom-tailmatch") return gen_nonrandom_tailmatch(spec.n, spec.seed);
    if (name == "optimistic")
        return gen_optimistic(spec.n, spec.seed, get_param(spec, "gamma", 0.25));
    if (name == "normal-quartet") return gen_normal_quartet(spec.n, spec.seed);
    if (name == "gpd-pair")
        return gen_gpd_pair(spec.n, spec.seed, get_param(spec, "xi", 0.25),
                            get_param(spec, "eta", 0.25), get_param(spec, "sigma_f", 1.0));
    throw domain_error("unknown scenario '" + name + "'");
}

}  // namespace tailcal::simlab
