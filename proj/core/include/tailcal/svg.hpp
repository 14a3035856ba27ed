#pragma once

// Native SVG chart emission: axes, optional diagonal reference, one
// polyline per series, shaded confidence bands. Plots are a pure view of
// already-written CSV data; nothing here feeds back into the numbers.

#include <string>
#include <vector>

namespace tailcal {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    std::vector<double> lower, upper;  // optional band

    bool has_band() const { return !lower.empty(); }
};

struct PlotSpec {
    std::string title;
    std::string x_label, y_label;
    bool diagonal = false;      // dashed y = x reference
    bool reference_one = false; // dashed y = 1 reference
    std::vector<PlotSeries> series;
};

std::string render_svg(const PlotSpec& spec);

}  // namespace tailcal
