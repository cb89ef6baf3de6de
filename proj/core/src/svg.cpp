#include "wgt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "wgt/errors.hpp"

namespace wgt {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_label(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    [[nodiscard]] double place(double v) const {
        const double t = log ? std::log10(v) : v;
        return (t - lo) / (hi - lo);
    }
};

Axis make_axis(double lo, double hi, bool log) {
    Axis a;
    a.log = log;
    if (log) {
        lo = std::log10(lo);
        hi = std::log10(hi);
    }
    if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo)) * 0.05;
        lo -= pad;
        hi += pad;
    } else if (!log) {
        const double pad = (hi - lo) * 0.05;
        lo -= pad;
        hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

std::vector<double> axis_ticks(const Axis& a) {
    std::vector<double> t;
    if (a.log) {
        for (int d = static_cast<int>(std::ceil(a.lo)); d <= static_cast<int>(std::floor(a.hi));
             ++d)
            t.push_back(std::pow(10.0, d));
        if (t.empty()) t.push_back(std::pow(10.0, 0.5 * (a.lo + a.hi)));
        return t;
    }
    for (int i = 0; i <= 4; ++i) t.push_back(a.lo + (a.hi - a.lo) * i / 4.0);
    return t;
}

}  // namespace

std::string render_line_plot(const PlotSpec& spec) {
    if (spec.series.empty()) throw validation_error("svg: plot needs at least one series");

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size()) throw validation_error("svg: series size mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_x && !(s.x[i] > 0.0)) continue;
            if (spec.log_y && !(s.y[i] > 0.0)) continue;
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
        }
    }
    if (!(x_lo <= x_hi)) throw validation_error("svg: no plottable points");

    const Axis ax = make_axis(x_lo, x_hi, spec.log_x);
    const Axis ay = make_axis(y_lo, y_hi, spec.log_y);
    const double ml = 70, mr = 20, mt = 36, mb = 48;
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;
    auto X = [&](double v) { return ml + ax.place(v) * pw; };
    auto Y = [&](double v) { return mt + (1.0 - ay.place(v)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fmt(spec.width / 2.0)
      << "\" y=\"20\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">"
      << escape(spec.title) << "</text>\n";

    for (double t : axis_ticks(ax)) {
        const double px = X(t);
        o << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(px)
          << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        o << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(mt + ph + 16)
          << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">"
          << fmt_label(t) << "</text>\n";
    }
    for (double t : axis_ticks(ay)) {
        const double py = Y(t);
        o << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(ml + pw)
          << "\" y2=\"" << fmt(py) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        o << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(py + 4)
          << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" << fmt_label(t)
          << "</text>\n";
    }
    o << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(ml + pw / 2.0) << "\" y=\"" << fmt(spec.height - 10.0)
      << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << fmt(mt + ph / 2.0)
      << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 16 "
      << fmt(mt + ph / 2.0) << ")\">" << escape(spec.y_label) << "</text>\n";

    for (const auto& s : spec.series) {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
          << s.stroke_width << "\"";
        if (s.dashed) o << " stroke-dasharray=\"6 4\"";
        o << " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (spec.log_x && !(s.x[i] > 0.0)) continue;
            if (spec.log_y && !(s.y[i] > 0.0)) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) o << " ";
            o << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i]));
            first = false;
        }
        o << "\"/>\n";
    }

    double ly = mt + 14;
    for (const auto& s : spec.series) {
        if (s.label.empty()) continue;
        o << "<line x1=\"" << fmt(ml + pw - 150) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
          << fmt(ml + pw - 126) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << s.color
          << "\" stroke-width=\"2\"";
        if (s.dashed) o << " stroke-dasharray=\"6 4\"";
        o << "/>\n";
        o << "<text x=\"" << fmt(ml + pw - 120) << "\" y=\"" << fmt(ly)
          << "\" font-family=\"monospace\" font-size=\"11\">" << escape(s.label) << "</text>\n";
        ly += 16;
    }
    o << "</svg>\n";
    return o.str();
}

std::string render_heatmap(const HeatmapSpec& spec) {
    if (spec.nx < 1 || spec.ny < 1 ||
        spec.values.size() != static_cast<std::size_t>(spec.nx) * spec.ny)
        throw validation_error("svg: heatmap grid/value mismatch");

    // Block-average down to a bounded cell count.
    const int max_cx = 300, max_cy = 150;
    const int bx = (spec.nx + max_cx - 1) / max_cx;
    const int by = (spec.ny + max_cy - 1) / max_cy;
    const int cx = (spec.nx + bx - 1) / bx;
    const int cy = (spec.ny + by - 1) / by;
    std::vector<double> cells(static_cast<std::size_t>(cx) * cy, 0.0);
    for (int i = 0; i < cx; ++i) {
        for (int j = 0; j < cy; ++j) {
            double acc = 0.0;
            int cnt = 0;
            for (int ii = i * bx; ii < std::min((i + 1) * bx, spec.nx); ++ii)
                for (int jj = j * by; jj < std::min((j + 1) * by, spec.ny); ++jj) {
                    acc += spec.values[static_cast<std::size_t>(ii) * spec.ny + jj];
                    ++cnt;
                }
            cells[static_cast<std::size_t>(i) * cy + j] = cnt ? acc / cnt : 0.0;
        }
    }

    double v_min = spec.v_min, v_max = spec.v_max;
    if (!(v_max > v_min)) {
        v_min = *std::min_element(cells.begin(), cells.end());
        v_max = *std::max_element(cells.begin(), cells.end());
        if (!(v_max > v_min)) v_max = v_min + 1.0;
    }

    const double ml = 60, mr = 20, mt = 36, mb = 40;
    const double pw = spec.width - ml - mr;
    const double ph = spec.height - mt - mb;

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fmt(spec.width / 2.0)
      << "\" y=\"20\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">"
      << escape(spec.title) << " [" << fmt_label(v_min) << ", " << fmt_label(v_max)
      << "]</text>\n";

    const double cw = pw / cx;
    const double ch = ph / cy;
    for (int i = 0; i < cx; ++i) {
        for (int j = 0; j < cy; ++j) {
            double t = (cells[static_cast<std::size_t>(i) * cy + j] - v_min) / (v_max - v_min);
            t = std::clamp(t, 0.0, 1.0);
            const int gray = static_cast<int>(std::lround(255.0 * (1.0 - t)));
            // y axis points up: row j=0 is the bottom of the plot
            o << "<rect x=\"" << fmt(ml + i * cw) << "\" y=\"" << fmt(mt + ph - (j + 1) * ch)
              << "\" width=\"" << fmt(cw + 0.5) << "\" height=\"" << fmt(ch + 0.5)
              << "\" fill=\"rgb(" << gray << "," << gray << "," << gray << ")\"/>\n";
        }
    }
    o << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(ml) << "\" y=\"" << fmt(mt + ph + 16)
      << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">"
      << fmt_label(spec.x0) << "</text>\n";
    o << "<text x=\"" << fmt(ml + pw) << "\" y=\"" << fmt(mt + ph + 16)
      << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">"
      << fmt_label(spec.x1) << "</text>\n";
    o << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(mt + ph)
      << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" << fmt_label(spec.y0)
      << "</text>\n";
    o << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(mt + 10)
      << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" << fmt_label(spec.y1)
      << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace wgt
