#include "tailcal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tailcal {

namespace {

constexpr double kWidth = 480, kHeight = 400;
constexpr double kLeft = 60, kRight = 16, kTop = 34, kBottom = 48;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
    double lo = 0.0, hi = 1.0;
    void extend(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// round a tick step to 1/2/5 times a power of ten
double nice_step(double span) {
    if (!(span > 0.0)) return 1.0;
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double frac = raw / mag;
    double step = frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0;
    return step * mag;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    Range xr, yr;
    bool any = false;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                xr.lo = xr.hi = s.x[i];
                yr.lo = yr.hi = s.y[i];
                any = true;
            }
            xr.extend(s.x[i]);
            yr.extend(s.y[i]);
            if (s.has_band()) {
                yr.extend(s.lower[i]);
                yr.extend(s.upper[i]);
            }
        }
    }
    if (spec.diagonal) {
        yr.extend(xr.lo);
        yr.extend(xr.hi);
    }
    if (spec.reference_one) yr.extend(1.0);
    if (xr.hi <= xr.lo) xr.hi = xr.lo + 1.0;
    if (yr.hi <= yr.lo) yr.hi = yr.lo + 1.0;

    auto px = [&](double x) {
        return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kWidth - kLeft - kRight);
    };
    auto py = [&](double y) {
        return kHeight - kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << spec.title << "</text>\n";

    // axes with ticks
    svg << "<g stroke=\"black\" stroke-width=\"1\">\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << kHeight - kBottom << "\"/>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kHeight - kBottom << "\"/>\n";
    svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"10\">\n";
    double xstep = nice_step(xr.hi - xr.lo);
    for (double t = std::ceil(xr.lo / xstep) * xstep; t <= xr.hi + 1e-9 * xstep; t += xstep) {
        svg << "<line x1=\"" << px(t) << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << px(t)
            << "\" y2=\"" << kHeight - kBottom + 4 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(t) << "\" y=\"" << kHeight - kBottom + 16
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    double ystep = nice_step(yr.hi - yr.lo);
    for (double t = std::ceil(yr.lo / ystep) * ystep; t <= yr.hi + 1e-9 * ystep; t += ystep) {
        svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << py(t) << "\" x2=\"" << kLeft
            << "\" y2=\"" << py(t) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(t) + 3
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.x_label << "</text>\n";
    svg << "<text x=\"14\" y=\"" << (kTop + kHeight - kBottom) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
        << (kTop + kHeight - kBottom) / 2 << ")\">" << spec.y_label << "</text>\n";
    svg << "</g>\n";

    if (spec.diagonal) {
        double a = std::max(xr.lo, yr.lo), b = std::min(xr.hi, yr.hi);
        if (b > a)
            svg << "<line x1=\"" << px(a) << "\" y1=\"" << py(a) << "\" x2=\"" << px(b)
                << "\" y2=\"" << py(b)
                << "\" stroke=\"#999\" stroke-dasharray=\"5,4\" stroke-width=\"1\"/>\n";
    }
    if (spec.reference_one) {
        svg << "<line x1=\"" << px(xr.lo) << "\" y1=\"" << py(1.0) << "\" x2=\"" << px(xr.hi)
            << "\" y2=\"" << py(1.0)
            << "\" stroke=\"#999\" stroke-dasharray=\"5,4\" stroke-width=\"1\"/>\n";
    }

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (s.has_band()) {
            svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" "
                << "points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << px(s.x[i]) << ',' << py(s.upper[i]) << ' ';
            for (std::size_t i = s.x.size(); i-- > 0;)
                svg << px(s.x[i]) << ',' << py(s.lower[i]) << ' ';
            svg << "\"/>\n";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" "
            << "points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        svg << "\"/>\n";
        // legend entry
        double ly = kTop + 14 * static_cast<double>(k);
        svg << "<line x1=\"" << kWidth - kRight - 110 << "\" y1=\"" << ly << "\" x2=\""
            << kWidth - kRight - 92 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kWidth - kRight - 88 << "\" y=\"" << ly + 3
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.label << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace tailcal
