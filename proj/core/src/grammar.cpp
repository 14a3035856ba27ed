#include "tailcal/grammar.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

namespace tailcal {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

struct Parser {
    std::string_view src;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "distribution spec, offset " << pos << ": " << msg;
        throw parse_error(os.str());
    }

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        if (pos == start) fail("expected identifier");
        return std::string(src.substr(start, pos - start));
    }

    double number() {
        skip_ws();
        std::size_t start = pos;
        if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
        if (src.compare(pos, 3, "inf") == 0) {
            pos += 3;
            return src[start] == '-' ? -std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::infinity();
        }
        while (pos < src.size() &&
               (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.' ||
                src[pos] == 'e' || src[pos] == 'E' ||
                ((src[pos] == '+' || src[pos] == '-') &&
                 (src[pos - 1] == 'e' || src[pos - 1] == 'E'))))
            ++pos;
        double value{};
        auto res = std::from_chars(src.data() + start, src.data() + pos, value);
        if (res.ec != std::errc() || res.ptr != src.data() + pos || pos == start)
            fail("malformed number");
        return value;
    }

    // a parenthesized argument list of named scalars, nested specs, and
    // bare numbers (for ensembles)
    struct Args {
        std::map<std::string, double> named;
        std::vector<Dist> dists;
        std::vector<double> bare;
    };

    bool looks_like_number() {
        skip_ws();
        if (pos >= src.size()) return false;
        char c = src[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-')
            return true;
        return src.compare(pos, 3, "inf") == 0;
    }

    Args arg_list() {
        Args args;
        expect('(');
        if (eat(')')) return args;
        while (true) {
            if (looks_like_number()) {
                args.bare.push_back(number());
            } else {
                std::size_t mark = pos;
                std::string name = ident();
                skip_ws();
                if (pos < src.size() && src[pos] == '=') {
                    ++pos;
                    double v = number();
                    if (!args.named.emplace(name, v).second)
                        fail("duplicate parameter '" + name + "'");
                } else {
                    pos = mark;
                    args.dists.push_back(dist());
                }
            }
            if (eat(')')) break;
            expect(',');
        }
        return args;
    }

    double named(const Args& args, const std::string& family, const std::string& key) {
        auto it = args.named.find(key);
        if (it == args.named.end()) fail(family + ": missing parameter '" + key + "'");
        return it->second;
    }

    void check_consumed(const Args& args, const std::string& family, std::size_t names,
                        std::size_t dists, std::size_t bare) {
        if (args.named.size() != names || args.dists.size() != dists ||
            args.bare.size() != bare)
            fail(family + ": unexpected arguments");
    }

    Dist dist() {
        std::string family = ident();
        Args args = arg_list();
        if (family == "normal") {
            check_consumed(args, family, 2, 0, 0);
            return Dist::normal(named(args, family, "mu"), named(args, family, "sigma"));
        }
        if (family == "uniform") {
            check_consumed(args, family, 2, 0, 0);
            return Dist::uniform(named(args, family, "a"), named(args, family, "b"));
        }
        if (family == "exponential") {
            check_consumed(args, family, 1, 0, 0);
            return Dist::exponential(named(args, family, "rate"));
        }
        if (family == "gamma") {
            check_consumed(args, family, 2, 0, 0);
            return Dist::gamma(named(args, family, "shape"), named(args, family, "scale"));
        }
        if (family == "logistic") {
            check_consumed(args, family, 2, 0, 0);
            return Dist::logistic(named(args, family, "mu"), named(args, family, "s"));
        }
        if (family == "gpd") {
            check_consumed(args, family, 2, 0, 0);
            return Dist::gpd(named(args, family, "sigma"), named(args, family, "xi"));
        }
        if (family == "gev") {
            check_consumed(args, family, 3, 0, 0);
            return Dist::gev(named(args, family, "mu"), named(args, family, "sigma"),
                             named(args, family, "xi"));
        }
        if (family == "ensemble") {
            check_consumed(args, family, 0, 0, args.bare.size());
            if (args.bare.empty()) fail("ensemble: needs at least one member");
            return Dist::ensemble(std::move(args.bare));
        }
        if (family == "mixture") {
            check_consumed(args, family, 1, 2, 0);
            return Dist::mixture(named(args, family, "lambda"), std::move(args.dists[0]),
                                 std::move(args.dists[1]));
        }
        if (family == "shifted") {
            check_consumed(args, family, 1, 1, 0);
            return Dist::shifted(std::move(args.dists[0]), named(args, family, "by"));
        }
        if (family == "scaled") {
            check_consumed(args, family, 1, 1, 0);
            return Dist::scaled(std::move(args.dists[0]), named(args, family, "by"));
        }
        if (family == "censored_below") {
            check_consumed(args, family, 1, 1, 0);
            return Dist::censored_below(std::move(args.dists[0]), named(args, family, "at"));
        }
        if (family == "piecewise") {
            check_consumed(args, family, 1, 2, 0);
            return Dist::piecewise(std::move(args.dists[0]), std::move(args.dists[1]),
                                   named(args, family, "at"));
        }
        fail("unknown family '" + family + "'");
    }
};

void format_into(const Dist& d, std::string& out) {
    std::visit(
        [&out](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            auto num = [&out](double v) { out += format_double(v); };
            if constexpr (std::is_same_v<T, Dist::Normal>) {
                out += "normal(mu=";
                num(n.mu);
                out += ", sigma=";
                num(n.sigma);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Uniform>) {
                out += "uniform(a=";
                num(n.a);
                out += ", b=";
                num(n.b);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Exponential>) {
                out += "exponential(rate=";
                num(n.rate);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Gamma>) {
                out += "gamma(shape=";
                num(n.shape);
                out += ", scale=";
                num(n.scale);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Logistic>) {
                out += "logistic(mu=";
                num(n.mu);
                out += ", s=";
                num(n.s);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Gpd>) {
                out += "gpd(sigma=";
                num(n.sigma);
                out += ", xi=";
                num(n.xi);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Gev>) {
                out += "gev(mu=";
                num(n.mu);
                out += ", sigma=";
                num(n.sigma);
                out += ", xi=";
                num(n.xi);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Ensemble>) {
                out += "ensemble(";
                for (std::size_t i = 0; i < n.members.size(); ++i) {
                    if (i) out += ", ";
                    num(n.members[i]);
                }
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Mixture>) {
                out += "mixture(";
                format_into(*n.first, out);
                out += ", ";
                format_into(*n.second, out);
                out += ", lambda=";
                num(n.lambda);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Shifted>) {
                out += "shifted(";
                format_into(*n.base, out);
                out += ", by=";
                num(n.by);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Scaled>) {
                out += "scaled(";
                format_into(*n.base, out);
                out += ", by=";
                num(n.by);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::CensoredBelow>) {
                out += "censored_below(";
                format_into(*n.base, out);
                out += ", at=";
                num(n.at);
                out += ')';
            } else if constexpr (std::is_same_v<T, Dist::Piecewise>) {
                out += "piecewise(";
                format_into(*n.below, out);
                out += ", ";
                format_into(*n.above, out);
                out += ", at=";
                num(n.at);
                out += ')';
            }
        },
        d.node());
}

}  // namespace

Dist parse_dist(std::string_view spec) {
    Parser p{spec};
    Dist d = p.dist();
    p.skip_ws();
    if (p.pos != spec.size()) p.fail("trailing characters");
    return d;
}

std::string format_dist(const Dist& d) {
    std::string out;
    format_into(d, out);
    return out;
}

}  // namespace tailcal
