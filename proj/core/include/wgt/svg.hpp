#pragma once

#include <string>
#include <vector>

namespace wgt {

// Minimal self-contained SVG emission for diagnostic plots: polyline series
// with linear or log10 axes, and grayscale cell heatmaps. Output is
// deterministic (fixed number formatting).

struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#000000";
    double stroke_width = 1.5;
    bool dashed = false;
    std::string label;  // legend entry when nonempty
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;  // nonpositive values are dropped from log plots
    std::vector<PlotSeries> series;
    int width = 720;
    int height = 480;
};

[[nodiscard]] std::string render_line_plot(const PlotSpec& spec);

struct HeatmapSpec {
    std::string title;
    double x0 = 0.0, x1 = 1.0;  // physical extents
    double y0 = 0.0, y1 = 1.0;
    int nx = 0, ny = 0;         // values laid out x-major, nx*ny
    std::vector<double> values;
    double v_min = 0.0, v_max = 0.0;  // equal -> auto range from data
    int width = 720;
    int height = 320;
};

// Dark = high value. Grids larger than ~300x150 are block-averaged down.
[[nodiscard]] std::string render_heatmap(const HeatmapSpec& spec);

}  // namespace wgt
