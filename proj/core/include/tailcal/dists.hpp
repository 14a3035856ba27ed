#pragma once

// Forecast distributions: parametric families, transforms, censoring,
// mixtures, and empirical ensembles behind one evaluable interface with
// exact cdf / left-limit / quantile / sampling semantics.
//
// Dist values are immutable after construction; all evaluations are pure
// and safe for concurrent use. Sampling consumes a caller-owned stream.

#include <memory>
#include <variant>
#include <vector>

#include "tailcal/errors.hpp"

namespace tailcal {

class Dist {
public:
    enum class Family {
        normal,
        uniform,
        exponential,
        gamma,
        logistic,
        gpd,
        gev,
        ensemble,
        mixture,
        shifted,
        scaled,
        censored_below,
        piecewise,
    };

    // Parametric families. Scale-like parameters must be positive.
    static Dist normal(double mu, double sigma);
    static Dist uniform(double a, double b);
    static Dist exponential(double rate);
    static Dist gamma(double shape, double scale);
    static Dist logistic(double mu, double s);
    // GPD_{sigma,xi} on x >= 0: cdf 1 - (1 + xi x / sigma)_+^{-1/xi},
    // exponential limit at xi = 0.
    static Dist gpd(double sigma, double xi);
    static Dist gev(double mu, double sigma, double xi);

    // Empirical ensemble; cdf steps by multiplicity/m at each member.
    static Dist ensemble(std::vector<double> members);

    // lambda * a + (1 - lambda) * b. Returns a or b outright at the ends.
    static Dist mixture(double lambda, Dist a, Dist b);

    // cdf(x) = base(x - by)
    static Dist shifted(Dist base, double by);
    // cdf(x) = base(x / by), by > 0
    static Dist scaled(Dist base, double by);
    // atom of mass base(at) placed at `at`; agrees with base above
    static Dist censored_below(Dist base, double at);
    // cdf(x) = below(x) for x < at, above(x) for x >= at;
    // rejects splices that would break monotonicity
    static Dist piecewise(Dist below, Dist above, double at);

    Family family() const;

    // P(X <= x); nondecreasing, right-continuous.
    double cdf(double x) const;

    // Left-hand limit sup_{w < x} cdf(w); equals cdf(x) except at atoms.
    double cdf_left(double x) const;

    // Generalized inverse inf{y : cdf(y) >= u} for u in (0, 1].
    // For ensembles this is the ceil(u*m)-th order statistic.
    double quantile(double u) const;

    // Inversion sampling; deterministic for a given stream state.
    template <class Source>
    double sample(Source& src) const {
        return quantile(src.next());
    }

    // Support bounds as extended reals.
    double lower() const;
    double upper() const;

    // True when the cdf has no atoms.
    bool continuous() const { return continuous_; }

    // Atom locations with positive mass, in increasing order.
    std::vector<double> atoms() const;

    struct Normal {
        double mu, sigma;
    };
    struct Uniform {
        double a, b;
    };
    struct Exponential {
        double rate;
    };
    struct Gamma {
        double shape, scale;
    };
    struct Logistic {
        double mu, s;
    };
    struct Gpd {
        double sigma, xi;
    };
    struct Gev {
        double mu, sigma, xi;
    };
    struct Ensemble {
        std::vector<double> members;  // as given, printed verbatim
        std::vector<double> sorted;
    };
    struct Mixture {
        double lambda;
        std::shared_ptr<const Dist> first, second;
    };
    struct Shifted {
        std::shared_ptr<const Dist> base;
        double by;
    };
    struct Scaled {
        std::shared_ptr<const Dist> base;
        double by;
    };
    struct CensoredBelow {
        std::shared_ptr<const Dist> base;
        double at;
    };
    struct Piecewise {
        std::shared_ptr<const Dist> below, above;
        double at;
    };

    using Node = std::variant<Normal, Uniform, Exponential, Gamma, Logistic, Gpd, Gev,
                              Ensemble, Mixture, Shifted, Scaled, CensoredBelow, Piecewise>;

    const Node& node() const { return node_; }

private:
    explicit Dist(Node node);

    Node node_;
    bool continuous_ = true;
};

// Conditional excess distribution F_t(x) = (F(t+x) - F(t)) / (1 - F(t)) for
// x >= 0; identically one when F(t) = 1 (degenerate convention, flagged).
class Excess {
public:
    Excess(Dist parent, double threshold);

    double cdf(double x) const;
    double cdf_left(double x) const;
    bool degenerate() const { return degenerate_; }
    double threshold() const { return threshold_; }
    const Dist& parent() const { return parent_; }

private:
    Dist parent_;
    double threshold_;
    double cdf_at_t_;
    double surv_at_t_;
    bool degenerate_;
};

inline Excess excess_distribution(Dist d, double t) { return Excess(std::move(d), t); }

}  // namespace tailcal
