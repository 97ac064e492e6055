#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace lognls::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void absorb(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double m = 0.04 * (hi - lo);
            lo -= m;
            hi += m;
        }
    }
};

} // namespace

void write_svg_grid(const std::string& path, const std::string& title,
                    const std::vector<Panel>& panels, int cols) {
    if (panels.empty()) throw std::invalid_argument("write_svg_grid: no panels");
    cols = std::max(1, cols);
    const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
    const double pw = 420.0, ph = 300.0, ml = 64.0, mr = 16.0, mt = 46.0, mb = 46.0;
    const double W = cols * pw, H = rows * ph + 28.0;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_grid: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" << title << "</text>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Panel& p = panels[pi];
        const double ox = (pi % static_cast<std::size_t>(cols)) * pw;
        const double oy = 28.0 + (pi / static_cast<std::size_t>(cols)) * ph;
        const double x0 = ox + ml, y0 = oy + mt;
        const double iw = pw - ml - mr, ih = ph - mt - mb;

        Range rx, ry;
        for (const Series& s : p.series)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                double yv = s.y[i];
                if (p.logy) {
                    if (!(yv > 0.0)) continue;
                    yv = std::log10(yv);
                }
                if (!std::isfinite(s.x[i]) || !std::isfinite(yv)) continue;
                rx.absorb(s.x[i]);
                ry.absorb(yv);
            }
        if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo)) {
            rx = Range{0.0, 1.0};
            ry = Range{0.0, 1.0};
        }
        rx.pad();
        ry.pad();

        auto sx = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * iw; };
        auto sy = [&](double v) { return y0 + ih - (v - ry.lo) / (ry.hi - ry.lo) * ih; };

        out << "<text x=\"" << ox + pw / 2 << "\" y=\"" << oy + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << p.title
            << "</text>\n";
        out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << iw << "\" height=\"" << ih
            << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

        for (int t = 0; t <= 4; ++t) {
            const double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
            const double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
            out << "<line x1=\"" << sx(fx) << "\" y1=\"" << y0 + ih << "\" x2=\"" << sx(fx)
                << "\" y2=\"" << y0 + ih + 4 << "\" stroke=\"#444\"/>\n";
            out << "<text x=\"" << sx(fx) << "\" y=\"" << y0 + ih + 16
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
                << fmt_tick(fx) << "</text>\n";
            out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << sy(fy) << "\" x2=\"" << x0 << "\" y2=\""
                << sy(fy) << "\" stroke=\"#444\"/>\n";
            out << "<text x=\"" << x0 - 6 << "\" y=\"" << sy(fy) + 3
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
                << fmt_tick(p.logy ? std::pow(10.0, fy) : fy) << "</text>\n";
        }
        out << "<text x=\"" << x0 + iw / 2 << "\" y=\"" << y0 + ih + 32
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << p.xlabel
            << "</text>\n";
        out << "<text x=\"" << ox + 14 << "\" y=\"" << y0 + ih / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
               "transform=\"rotate(-90 " << ox + 14 << " " << y0 + ih / 2 << ")\">" << p.ylabel
            << "</text>\n";

        for (std::size_t si = 0; si < p.series.size(); ++si) {
            const Series& s = p.series[si];
            const char* color = kPalette[si % kPaletteSize];
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.4\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                double yv = s.y[i];
                if (p.logy) {
                    if (!(yv > 0.0)) continue;
                    yv = std::log10(yv);
                }
                if (!std::isfinite(s.x[i]) || !std::isfinite(yv)) continue;
                out << fmt(sx(s.x[i])) << "," << fmt(sy(yv)) << " ";
            }
            out << "\"/>\n";
            if (!s.label.empty()) {
                const double ly = y0 + 14 + 14.0 * static_cast<double>(si);
                out << "<line x1=\"" << x0 + iw - 70 << "\" y1=\"" << ly - 4 << "\" x2=\""
                    << x0 + iw - 52 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
                    << "\" stroke-width=\"2\"/>\n";
                out << "<text x=\"" << x0 + iw - 48 << "\" y=\"" << ly
                    << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.label << "</text>\n";
            }
        }
    }
    out << "</svg>\n";
}

} // namespace lognls::svg
