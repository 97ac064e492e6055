// Minimal hand-rolled SVG line plots (documentation artifacts).
#pragma once

#include <string>
#include <vector>

namespace lognls::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Panel {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    bool logy = false;  // log10 vertical axis (positive data only)
};

/// Writes a grid of line-plot panels, `cols` panels per row.
void write_svg_grid(const std::string& path, const std::string& title,
                    const std::vector<Panel>& panels, int cols);

} // namespace lognls::svg
