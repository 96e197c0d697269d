#pragma once

// Minimal deterministic SVG 1.1 emitter for density curves and histograms.
// Hand-rolled on purpose: figures are artifacts, not interfaces, and the
// output must be byte-stable across runs and platforms (fixed formatting,
// no timestamps, no external renderer).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "critlab/measure.hpp"

namespace critlab {

struct PlotSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<std::pair<double, double>> points;
};

struct PlotBars {
    std::string color = "#c7c7c7";
    double lo = 0.0, hi = 1.0;        // support of the uniform bins
    std::vector<double> heights;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

// Renders bars behind lines in a fixed-size viewport with axis ticks.  All
// coordinates are formatted with %.6g so identical inputs give identical
// bytes.
inline std::string render_svg_plot(const std::string& title, const std::vector<PlotBars>& bars,
                                   const std::vector<PlotSeries>& series, int width = 720,
                                   int height = 480) {
    using detail::svg_num;
    const double ml = 64, mr = 24, mt = 40, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool first = true;
    auto grow = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        if (first) {
            x_lo = x_hi = x;
            y_lo = y_hi = y;
            first = false;
        } else {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    };
    for (const auto& b : bars) {
        grow(b.lo, 0.0);
        for (std::size_t i = 0; i < b.heights.size(); ++i) grow(b.hi, b.heights[i]);
    }
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) grow(x, y);
    if (first) grow(0.0, 0.0);
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    y_hi *= 1.05;  // headroom so peaks do not touch the frame
    if (y_lo > 0.0) y_lo = 0.0;

    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) { return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"" + svg_num(width / 2.0) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           detail::xml_escape(title) + "</text>\n";

    for (const auto& b : bars) {
        const int n = static_cast<int>(b.heights.size());
        if (n == 0) continue;
        const double bw = (b.hi - b.lo) / n;
        for (int i = 0; i < n; ++i) {
            const double h = b.heights[static_cast<std::size_t>(i)];
            if (h <= 0.0) continue;
            const double x0 = px(b.lo + i * bw), x1 = px(b.lo + (i + 1) * bw);
            const double y0 = py(h), y1 = py(0.0);
            out += "<rect x=\"" + svg_num(x0) + "\" y=\"" + svg_num(y0) + "\" width=\"" +
                   svg_num(x1 - x0) + "\" height=\"" + svg_num(y1 - y0) + "\" fill=\"" + b.color +
                   "\" fill-opacity=\"0.7\"/>\n";
        }
    }

    // frame and ticks
    out += "<rect x=\"" + svg_num(ml) + "\" y=\"" + svg_num(mt) + "\" width=\"" + svg_num(pw) +
           "\" height=\"" + svg_num(ph) + "\" fill=\"none\" stroke=\"#404040\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = x_lo + (x_hi - x_lo) * t / 4.0;
        const double yv = y_lo + (y_hi - y_lo) * t / 4.0;
        out += "<line x1=\"" + svg_num(px(xv)) + "\" y1=\"" + svg_num(mt + ph) + "\" x2=\"" +
               svg_num(px(xv)) + "\" y2=\"" + svg_num(mt + ph + 5) + "\" stroke=\"#404040\"/>\n";
        out += "<text x=\"" + svg_num(px(xv)) + "\" y=\"" + svg_num(mt + ph + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               svg_num(xv) + "</text>\n";
        out += "<line x1=\"" + svg_num(ml - 5) + "\" y1=\"" + svg_num(py(yv)) + "\" x2=\"" +
               svg_num(ml) + "\" y2=\"" + svg_num(py(yv)) + "\" stroke=\"#404040\"/>\n";
        out += "<text x=\"" + svg_num(ml - 8) + "\" y=\"" + svg_num(py(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + svg_num(yv) +
               "</text>\n";
    }

    for (const auto& s : series) {
        if (s.points.empty()) continue;
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            if (i) out += " ";
            out += svg_num(px(s.points[i].first)) + "," + svg_num(py(s.points[i].second));
        }
        out += "\"/>\n";
    }

    // legend
    double ly = mt + 16;
    for (const auto& s : series) {
        if (s.label.empty()) continue;
        out += "<line x1=\"" + svg_num(ml + 10) + "\" y1=\"" + svg_num(ly - 4) + "\" x2=\"" +
               svg_num(ml + 34) + "\" y2=\"" + svg_num(ly - 4) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\"/>\n";
        out += "<text x=\"" + svg_num(ml + 40) + "\" y=\"" + svg_num(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + detail::xml_escape(s.label) +
               "</text>\n";
        ly += 16;
    }
    out += "</svg>\n";
    return out;
}

inline PlotSeries series_from_measure(const Measure1D& mu, const std::string& label,
                                      const std::string& color) {
    PlotSeries s;
    s.label = label;
    s.color = color;
    s.points.reserve(static_cast<std::size_t>(mu.n_grid));
    for (int i = 0; i < mu.n_grid; ++i)
        s.points.emplace_back(mu.x_at(i), mu.density[static_cast<std::size_t>(i)]);
    return s;
}

inline PlotBars bars_from_histogram(const Measure1D& hist, const std::string& color = "#c7c7c7") {
    PlotBars b;
    b.color = color;
    b.lo = hist.lo;
    b.hi = hist.hi;
    b.heights = hist.density;
    return b;
}

}  // namespace critlab
