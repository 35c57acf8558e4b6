#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "casimir/statistics.hpp"

namespace casimir {

// Minimal self-contained SVG rendering of a difference plot: measured-minus-
// theory dots against separation, with the +/- Xi_beta confidence-band borders
// overlaid for each requested beta. Output is deterministic (fixed formatting,
// no timestamps) so repeated runs are byte-identical.

struct PlotSpec {
    std::string title;
    std::string x_label = "separation a (nm)";
    std::string y_label = "F'_theor - F'_expt (uN/m)";
    int width = 880;
    int height = 540;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Nice tick step: 1, 2 or 5 times a power of ten, targeting ~6 intervals.
inline double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

inline const char* band_color(std::size_t i) {
    static const char* colors[] = {"#c0392b", "#2471a3", "#1e8449", "#b7950b", "#7d3c98",
                                   "#117a65"};
    return colors[i % 6];
}

} // namespace detail

inline std::string render_difference_plot(const std::vector<DifferencePoint>& points,
                                          const std::vector<ConfidenceBand>& bands,
                                          const PlotSpec& spec = {}) {
    if (points.empty()) throw std::domain_error("render_difference_plot: no points");
    const double ml = 72.0, mr = 18.0, mt = 40.0, mb = 52.0;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;

    double x0 = points.front().separation_nm, x1 = points.back().separation_nm;
    if (x1 <= x0) x1 = x0 + 1.0;
    const double xpad = 0.02 * (x1 - x0);
    x0 -= xpad;
    x1 += xpad;

    double ymax = 0.0;
    for (const auto& p : points) ymax = std::max(ymax, std::abs(p.difference));
    for (const auto& b : bands)
        for (double xi : b.xi) ymax = std::max(ymax, xi);
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.1;
    const double y0 = -ymax, y1 = ymax;

    const auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return mt + (y1 - y) / (y1 - y0) * ph; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
         "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " +
         std::to_string(spec.width) + " " + std::to_string(spec.height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"" + detail::svg_num(ml) + "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"15\" fill=\"#111\">" + spec.title + "</text>\n";

    // axes frame, ticks, zero line
    s += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) + "\" width=\"" +
         detail::svg_num(pw) + "\" height=\"" + detail::svg_num(ph) +
         "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    const double xstep = detail::nice_step(x1 - x0);
    for (double t = std::ceil(x0 / xstep) * xstep; t <= x1 + 1e-9 * xstep; t += xstep) {
        const double x = px(t);
        s += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(mt + ph) +
             "\" x2=\"" + detail::svg_num(x) + "\" y2=\"" + detail::svg_num(mt + ph + 5) +
             "\" stroke=\"#333\"/>\n";
        s += "<text x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(mt + ph + 20) +
             "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#111\" "
             "text-anchor=\"middle\">" + detail::tick_label(t) + "</text>\n";
    }
    const double ystep = detail::nice_step(y1 - y0);
    for (double t = std::ceil(y0 / ystep) * ystep; t <= y1 + 1e-9 * ystep; t += ystep) {
        const double y = py(t);
        s += "<line x1=\"" + detail::svg_num(ml - 5) + "\" y1=\"" + detail::svg_num(y) +
             "\" x2=\"" + detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(y) +
             "\" stroke=\"#333\"/>\n";
        s += "<text x=\"" + detail::svg_num(ml - 9) + "\" y=\"" + detail::svg_num(y + 4) +
             "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#111\" "
             "text-anchor=\"end\">" + detail::tick_label(std::abs(t) < 1e-12 ? 0.0 : t) +
             "</text>\n";
    }
    s += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(py(0.0)) +
         "\" x2=\"" + detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(py(0.0)) +
         "\" stroke=\"#999\" stroke-dasharray=\"4,4\"/>\n";

    // axis labels
    s += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" +
         detail::svg_num(spec.height - 12.0) +
         "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#111\" text-anchor=\"middle\">" +
         spec.x_label + "</text>\n";
    s += "<text x=\"16\" y=\"" + detail::svg_num(mt + ph / 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#111\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 " + detail::svg_num(mt + ph / 2) + ")\">" + spec.y_label +
         "</text>\n";

    // confidence-band borders (+Xi and -Xi polylines)
    for (std::size_t bi = 0; bi < bands.size(); ++bi) {
        const auto& b = bands[bi];
        const char* color = detail::band_color(bi);
        for (int sign : {+1, -1}) {
            std::string poly;
            for (std::size_t i = 0; i < b.xi.size(); ++i)
                poly += detail::svg_num(px(b.separation_nm[i])) + "," +
                        detail::svg_num(py(sign * b.xi[i])) + " ";
            s += "<polyline points=\"" + poly + "\" fill=\"none\" stroke=\"" + color +
                 "\" stroke-width=\"1.5\"/>\n";
        }
        char label[64];
        std::snprintf(label, sizeof label, "beta = %.6g", b.beta);
        s += "<text x=\"" + detail::svg_num(ml + pw - 8) + "\" y=\"" +
             detail::svg_num(mt + 18.0 + 16.0 * bi) +
             "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"" + color +
             "\">" + label + "</text>\n";
    }

    // difference dots
    for (const auto& p : points)
        s += "<circle cx=\"" + detail::svg_num(px(p.separation_nm)) + "\" cy=\"" +
             detail::svg_num(py(p.difference)) + "\" r=\"2.4\" fill=\"#111\"/>\n";

    s += "</svg>\n";
    return s;
}

} // namespace casimir
