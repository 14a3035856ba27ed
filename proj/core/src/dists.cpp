#include "tailcal/dists.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tailcal/math.hpp"

namespace tailcal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// treat |xi| below this as the exponential/Gumbel limit to avoid
// catastrophic cancellation near xi = 0
constexpr double kXiZero = 1e-8;

void require(bool ok, const char* msg) {
    if (!ok) throw parameter_error(msg);
}

bool is_finite(double x) { return std::isfinite(x); }

// inf{y : f(y) >= u} by bisection on [lo, hi] where f(lo) < u <= f(hi).
template <class F>
double bisect_inverse(const F& f, double u, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::fabs(hi)); ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) >= u)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

Dist::Dist(Node node) : node_(std::move(node)) {
    continuous_ = std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Ensemble>) {
                return false;
            } else if constexpr (std::is_same_v<T, Mixture>) {
                return n.first->continuous() && n.second->continuous();
            } else if constexpr (std::is_same_v<T, Shifted> || std::is_same_v<T, Scaled>) {
                return n.base->continuous();
            } else if constexpr (std::is_same_v<T, CensoredBelow>) {
                return n.base->continuous() && n.base->cdf(n.at) == 0.0;
            } else if constexpr (std::is_same_v<T, Piecewise>) {
                return n.below->continuous() && n.above->continuous() &&
                       n.below->cdf_left(n.at) == n.above->cdf(n.at);
            } else {
                return true;
            }
        },
        node_);
}

Dist Dist::normal(double mu, double sigma) {
    require(is_finite(mu) && sigma > 0.0 && is_finite(sigma), "normal: sigma must be positive");
    return Dist(Node{Normal{mu, sigma}});
}

Dist Dist::uniform(double a, double b) {
    require(is_finite(a) && is_finite(b) && a < b, "uniform: need a < b");
    return Dist(Node{Uniform{a, b}});
}

Dist Dist::exponential(double rate) {
    require(rate > 0.0 && is_finite(rate), "exponential: rate must be positive");
    return Dist(Node{Exponential{rate}});
}

Dist Dist::gamma(double shape, double scale) {
    require(shape > 0.0 && is_finite(shape), "gamma: shape must be positive");
    require(scale > 0.0 && is_finite(scale), "gamma: scale must be positive");
    return Dist(Node{Gamma{shape, scale}});
}

Dist Dist::logistic(double mu, double s) {
    require(is_finite(mu) && s > 0.0 && is_finite(s), "logistic: s must be positive");
    return Dist(Node{Logistic{mu, s}});
}

Dist Dist::gpd(double sigma, double xi) {
    require(sigma > 0.0 && is_finite(sigma), "gpd: sigma must be positive");
    require(is_finite(xi), "gpd: xi must be finite");
    return Dist(Node{Gpd{sigma, xi}});
}

Dist Dist::gev(double mu, double sigma, double xi) {
    require(is_finite(mu) && sigma > 0.0 && is_finite(sigma), "gev: sigma must be positive");
    require(is_finite(xi), "gev: xi must be finite");
    return Dist(Node{Gev{mu, sigma, xi}});
}

Dist Dist::ensemble(std::vector<double> members) {
    require(!members.empty(), "ensemble: needs at least one member");
    for (double m : members) require(is_finite(m), "ensemble: members must be finite");
    Ensemble e;
    e.sorted = members;
    std::sort(e.sorted.begin(), e.sorted.end());
    e.members = std::move(members);
    return Dist(Node{std::move(e)});
}

Dist Dist::mixture(double lambda, Dist a, Dist b) {
    require(lambda >= 0.0 && lambda <= 1.0, "mixture: lambda outside [0, 1]");
    if (lambda == 0.0) return b;
    if (lambda == 1.0) return a;
    return Dist(Node{Mixture{lambda, std::make_shared<const Dist>(std::move(a)),
                             std::make_shared<const Dist>(std::move(b))}});
}

Dist Dist::shifted(Dist base, double by) {
    require(is_finite(by), "shifted: offset must be finite");
    return Dist(Node{Shifted{std::make_shared<const Dist>(std::move(base)), by}});
}

Dist Dist::scaled(Dist base, double by) {
    require(by > 0.0 && is_finite(by), "scaled: factor must be positive");
    return Dist(Node{Scaled{std::make_shared<const Dist>(std::move(base)), by}});
}

Dist Dist::censored_below(Dist base, double at) {
    require(is_finite(at), "censored_below: censor point must be finite");
    return Dist(Node{CensoredBelow{std::make_shared<const Dist>(std::move(base)), at}});
}

Dist Dist::piecewise(Dist below, Dist above, double at) {
    require(is_finite(at), "piecewise: split point must be finite");
    require(below.cdf_left(at) <= above.cdf(at) + 1e-12,
            "piecewise: cdf would decrease across the split");
    return Dist(Node{Piecewise{std::make_shared<const Dist>(std::move(below)),
                               std::make_shared<const Dist>(std::move(above)), at}});
}

Dist::Family Dist::family() const {
    return static_cast<Family>(node_.index());
}

double Dist::cdf(double x) const {
    return std::visit(
        [x](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Normal>) {
                return math::norm_cdf((x - n.mu) / n.sigma);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (x <= n.a) return 0.0;
                if (x >= n.b) return 1.0;
                return (x - n.a) / (n.b - n.a);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return x <= 0.0 ? 0.0 : -std::expm1(-n.rate * x);
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return x <= 0.0 ? 0.0 : math::gammp(n.shape, x / n.scale);
            } else if constexpr (std::is_same_v<T, Logistic>) {
                return 1.0 / (1.0 + std::exp(-(x - n.mu) / n.s));
            } else if constexpr (std::is_same_v<T, Gpd>) {
                if (x <= 0.0) return 0.0;
                if (std::fabs(n.xi) < kXiZero) return -std::expm1(-x / n.sigma);
                double t = 1.0 + n.xi * x / n.sigma;
                if (t <= 0.0) return 1.0;  // xi < 0 beyond the upper endpoint
                return -std::expm1(-std::log1p(n.xi * x / n.sigma) / n.xi);
            } else if constexpr (std::is_same_v<T, Gev>) {
                double z = (x - n.mu) / n.sigma;
                if (std::fabs(n.xi) < kXiZero) return std::exp(-std::exp(-z));
                double t = 1.0 + n.xi * z;
                if (t <= 0.0) return n.xi > 0.0 ? 0.0 : 1.0;
                return std::exp(-std::exp(-std::log(t) / n.xi));
            } else if constexpr (std::is_same_v<T, Ensemble>) {
                auto it = std::upper_bound(n.sorted.begin(), n.sorted.end(), x);
                return static_cast<double>(it - n.sorted.begin()) /
                       static_cast<double>(n.sorted.size());
            } else if constexpr (std::is_same_v<T, Mixture>) {
                return n.lambda * n.first->cdf(x) + (1.0 - n.lambda) * n.second->cdf(x);
            } else if constexpr (std::is_same_v<T, Shifted>) {
                return n.base->cdf(x - n.by);
            } else if constexpr (std::is_same_v<T, Scaled>) {
                return n.base->cdf(x / n.by);
            } else if constexpr (std::is_same_v<T, CensoredBelow>) {
                return x < n.at ? 0.0 : n.base->cdf(x);
            } else {
                return x < n.at ? n.below->cdf(x) : n.above->cdf(x);
            }
        },
        node_);
}

double Dist::cdf_left(double x) const {
    return std::visit(
        [this, x](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Ensemble>) {
                auto it = std::lower_bound(n.sorted.begin(), n.sorted.end(), x);
                return static_cast<double>(it - n.sorted.begin()) /
                       static_cast<double>(n.sorted.size());
            } else if constexpr (std::is_same_v<T, Mixture>) {
                return n.lambda * n.first->cdf_left(x) +
                       (1.0 - n.lambda) * n.second->cdf_left(x);
            } else if constexpr (std::is_same_v<T, Shifted>) {
                return n.base->cdf_left(x - n.by);
            } else if constexpr (std::is_same_v<T, Scaled>) {
                return n.base->cdf_left(x / n.by);
            } else if constexpr (std::is_same_v<T, CensoredBelow>) {
                return x <= n.at ? 0.0 : n.base->cdf_left(x);
            } else if constexpr (std::is_same_v<T, Piecewise>) {
                return x <= n.at ? n.below->cdf_left(x) : n.above->cdf_left(x);
            } else {
                return cdf(x);
            }
        },
        node_);
}

double Dist::quantile(double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw domain_error("quantile: u outside (0, 1]");
    return std::visit(
        [this, u](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Normal>) {
                return n.mu + n.sigma * math::norm_quantile(u);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return n.a + u * (n.b - n.a);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log1p(-u) / n.rate;
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return n.scale * math::inv_gammp(n.shape, u);
            } else if constexpr (std::is_same_v<T, Logistic>) {
                if (u == 1.0) return kInf;
                return n.mu + n.s * std::log(u / (1.0 - u));
            } else if constexpr (std::is_same_v<T, Gpd>) {
                if (std::fabs(n.xi) < kXiZero) return -n.sigma * std::log1p(-u);
                if (u == 1.0) return n.xi < 0.0 ? -n.sigma / n.xi : kInf;
                return n.sigma * std::expm1(-n.xi * std::log1p(-u)) / n.xi;
            } else if constexpr (std::is_same_v<T, Gev>) {
                if (u == 1.0) return n.xi < 0.0 ? n.mu - n.sigma / n.xi : kInf;
                double w = -std::log(u);
                if (std::fabs(n.xi) < kXiZero) return n.mu - n.sigma * std::log(w);
                return n.mu + n.sigma * std::expm1(-n.xi * std::log(w)) / n.xi;
            } else if constexpr (std::is_same_v<T, Ensemble>) {
                auto m = n.sorted.size();
                auto k = static_cast<std::size_t>(
                    std::ceil(u * static_cast<double>(m)));
                k = std::min(std::max<std::size_t>(k, 1), m);
                return n.sorted[k - 1];
            } else if constexpr (std::is_same_v<T, Mixture>) {
                if (u == 1.0) return upper();
                double qa = n.first->quantile(u);
                double qb = n.second->quantile(u);
                double lo = std::min(qa, qb);
                double hi = std::max(qa, qb);
                if (lo == hi) return lo;
                if (cdf(lo) >= u) return lo;
                return bisect_inverse([this](double x) { return cdf(x); }, u, lo, hi);
            } else if constexpr (std::is_same_v<T, Shifted>) {
                return n.base->quantile(u) + n.by;
            } else if constexpr (std::is_same_v<T, Scaled>) {
                return n.base->quantile(u) * n.by;
            } else if constexpr (std::is_same_v<T, CensoredBelow>) {
                if (u <= n.base->cdf(n.at)) return n.at;
                return n.base->quantile(u);
            } else {
                double qa = n.below->quantile(u);
                if (qa < n.at) return qa;
                return std::max(n.at, n.above->quantile(u));
            }
        },
        node_);
}

double Dist::lower() const {
    return std::visit(
        [](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Normal> || std::is_same_v<T, Logistic>) {
                return -kInf;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return n.a;
            } else if constexpr (std::is_same_v<T, Exponential> || std::is_same_v<T, Gamma> ||
                                 std::is_same_v<T, Gpd>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, Gev>) {
                return n.xi > 0.0 ? n.mu - n.sigma / n.xi : -kInf;
            } else if constexpr (std::is_same_v<T, Ensemble>) {
                return n.sorted.front();
            } else if constexpr (std::is_same_v<T, Mixture>) {
                return std::min(n.first->lower(), n.second->lower());
            } else if constexpr (std::is_same_v<T, Shifted>) {
                return n.base->lower() + n.by;
            } else if constexpr (std::is_same_v<T, Scaled>) {
                return n.base->lower() * n.by;
            } else if constexpr (std::is_same_v<T, CensoredBelow>) {
                return n.base->cdf(n.at) > 0.0 ? n.at : n.base->lower();
            } else {
                if (n.below->cdf_left(n.at) > 0.0) return n.below->lower();
                return std::max(n.at, n.above->lower());
            }
        },
        node_);
}

double Dist::upper() const {
    return std::visit(
        [](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Normal> || std::is_same_v<T, Logistic> ||
                          std::is_same_v<T, Exponential> || std::is_same_v<T, Gamma>) {
                return kInf;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return n.b;
            } else if constexpr (std::is_same_v<T, Gpd>) {
                return n.xi < 0.0 ? -n.sigma / n.xi : kInf;
            } else if constexpr (std::is_same_v<T, Gev>) {
                return n.xi < 0.0 ? n.mu - n.sigma / n.xi : kInf;
            } else if constexpr (std::is_same_v<T, Ensemble>) {
                return n.sorted.back();
            } else if constexpr (std::is_same_v<T, Mixture>) {
                return std::max(n.first->upper(), n.second->upper());
            } else if constexpr (std::is_same_v<T, Shifted>) {
                return n.base->upper() + n.by;
            } else if constexpr (std::is_same_v<T, Scaled>) {
                return n.base->upper() * n.by;
            } else if constexpr (std::is_same_v<T, CensoredBelow>) {
                return n.base->cdf(n.at) >= 1.0 ? n.at : n.base->upper();
            } else {
                return n.above->cdf(n.at) >= 1.0 ? n.at : n.above->upper();
            }
        },
        node_);
}

std::vector<double> Dist::atoms() const {
    std::vector<double> out = std::visit(
        [](const auto& n) -> std::vector<double> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Ensemble>) {
                std::vector<double> a = n.sorted;
                a.erase(std::unique(a.begin(), a.end()), a.end());
                return a;
            } else if constexpr (std::is_same_v<T, Mixture>) {
                std::vector<double> a = n.first->atoms();
                std::vector<double> b = n.second->atoms();
                a.insert(a.end(), b.begin(), b.end());
                return a;
            } else if constexpr (std::is_same_v<T, Shifted>) {
                std::vector<double> a = n.base->atoms();
                for (auto& x : a) x += n.by;
                return a;
            } else if constexpr (std::is_same_v<T, Scaled>) {
                std::vector<double> a = n.base->atoms();
                for (auto& x : a) x *= n.by;
                return a;
            } else if constexpr (std::is_same_v<T, CensoredBelow>) {
                std::vector<double> a;
                if (n.base->cdf(n.at) > 0.0) a.push_back(n.at);
                for (double x : n.base->atoms())
                    if (x > n.at) a.push_back(x);
                return a;
            } else if constexpr (std::is_same_v<T, Piecewise>) {
                std::vector<double> a;
                for (double x : n.below->atoms())
                    if (x < n.at) a.push_back(x);
                if (n.below->cdf_left(n.at) < n.above->cdf(n.at)) a.push_back(n.at);
                for (double x : n.above->atoms())
                    if (x > n.at) a.push_back(x);
                return a;
            } else {
                return {};
            }
        },
        node_);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Excess::Excess(Dist parent, double threshold)
    : parent_(std::move(parent)), threshold_(threshold) {
    if (!std::isfinite(threshold)) throw domain_error("excess: threshold must be finite");
    cdf_at_t_ = parent_.cdf(threshold_);
    surv_at_t_ = 1.0 - cdf_at_t_;
    degenerate_ = !(surv_at_t_ > 0.0);
}

double Excess::cdf(double x) const {
    if (degenerate_) return 1.0;
    if (x < 0.0) return 0.0;
    return (parent_.cdf(threshold_ + x) - cdf_at_t_) / surv_at_t_;
}

double Excess::cdf_left(double x) const {
    if (degenerate_) return 1.0;
    if (x <= 0.0) return 0.0;
    return (parent_.cdf_left(threshold_ + x) - cdf_at_t_) / surv_at_t_;
}

}  // namespace tailcal
