// Figure emission from run manifests: reads the CSV outputs back and
// renders the SVG panels.
#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lognls/harness.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;

namespace lognls {

namespace {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::runtime_error("csv: missing column '" + name + "'");
    }
    std::vector<double> column(const std::string& name) const {
        const std::size_t idx = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[idx]);
        return out;
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv '" + path + "'");
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (t.columns.empty()) {
            while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
            continue;
        }
        std::vector<double> row;
        row.reserve(t.columns.size());
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.columns.size())
            throw std::runtime_error("csv '" + path + "': ragged row");
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw std::runtime_error("csv '" + path + "': empty file");
    return t;
}

std::vector<RunManifest> collect_manifests(const std::string& dir) {
    std::vector<std::string> paths;
    auto scan = [&paths](const fs::path& d) {
        if (!fs::is_directory(d)) return;
        for (const auto& e : fs::directory_iterator(d))
            if (e.is_regular_file() && e.path().string().ends_with("_manifest.json"))
                paths.push_back(e.path().string());
    };
    scan(dir);
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) scan(e.path());
    std::sort(paths.begin(), paths.end());
    std::vector<RunManifest> out;
    out.reserve(paths.size());
    for (const std::string& p : paths) out.push_back(read_manifest(p));
    return out;
}

// t,x,re,im rows -> per-time slices keyed by the time stamp.
std::map<double, std::vector<std::array<double, 3>>> slice_states(const CsvTable& t) {
    const std::size_t it = t.column_index("t");
    const std::size_t ix = t.column_index("x");
    const std::size_t ire = t.column_index("re");
    const std::size_t iim = t.column_index("im");
    std::map<double, std::vector<std::array<double, 3>>> out;
    for (const auto& r : t.rows) out[r[it]].push_back({r[ix], r[ire], r[iim]});
    return out;
}

std::string label_t(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "t=%.3g", t);
    return buf;
}

} // namespace

std::vector<std::string> emit_figures(const std::string& manifest_dir) {
    const std::vector<RunManifest> manifests = collect_manifests(manifest_dir);
    if (manifests.empty())
        throw std::runtime_error("emit_figures: no manifests under '" + manifest_dir + "'");
    std::vector<std::string> written;

    // Fig A: one panel per regularity N, one curve per K.
    {
        std::vector<std::pair<int, std::string>> runs;  // (K, csv path)
        for (const RunManifest& m : manifests) {
            if (m.scenario != "sweep_sobolev") continue;
            for (const std::string& out : m.outputs) {
                const auto pos = out.find("sweep_sobolev_K");
                if (pos == std::string::npos || !out.ends_with(".csv")) continue;
                const int K = std::stoi(out.substr(pos + 15));
                runs.emplace_back(K, out);
            }
        }
        std::sort(runs.begin(), runs.end());
        if (!runs.empty()) {
            std::vector<svg::Panel> panels;
            for (int N = 0; N <= 5; ++N) {
                svg::Panel p;
                p.title = "H^" + std::to_string(N) + "_h norm";
                p.xlabel = "t";
                p.ylabel = "norm";
                for (const auto& [K, path] : runs) {
                    const CsvTable t = read_csv(path);
                    svg::Series s;
                    s.label = "K=" + std::to_string(K);
                    s.x = t.column("t");
                    s.y = t.column("h" + std::to_string(N));
                    p.series.push_back(std::move(s));
                }
                panels.push_back(std::move(p));
            }
            const std::string path = manifest_dir + "/fig_sobolev_norms.svg";
            svg::write_svg_grid(path, "Discrete Sobolev norms under grid refinement", panels, 3);
            written.push_back(path);
        }
    }

    // Fig B: Re u and Im u vs x at the snapshot times of the tanh run.
    // The first manifest in path order wins when several runs are present.
    bool have_tanh_fig = false;
    for (const RunManifest& m : manifests) {
        if (m.scenario != "tanh_evolution" || have_tanh_fig) continue;
        for (const std::string& out : m.outputs) {
            if (!out.ends_with("tanh_evolution_states.csv")) continue;
            const auto slices = slice_states(read_csv(out));
            svg::Panel pre, pim;
            pre.title = "Re u";
            pim.title = "Im u";
            pre.xlabel = pim.xlabel = "x";
            pre.ylabel = "Re u";
            pim.ylabel = "Im u";
            for (const auto& [t, pts] : slices) {
                svg::Series sr, si;
                sr.label = si.label = label_t(t);
                for (const auto& p : pts) {
                    sr.x.push_back(p[0]);
                    sr.y.push_back(p[1]);
                    si.x.push_back(p[0]);
                    si.y.push_back(p[2]);
                }
                pre.series.push_back(std::move(sr));
                pim.series.push_back(std::move(si));
            }
            const std::string path = manifest_dir + "/fig_tanh_evolution.svg";
            svg::write_svg_grid(path, "Evolution of the tanh initial data", {pre, pim}, 2);
            written.push_back(path);
            have_tanh_fig = true;
            break;
        }
    }

    // Fig C: |u| vs x at the snapshot times, plus min|u| over time.
    bool have_cos_fig = false;
    for (const RunManifest& m : manifests) {
        if (m.scenario != "cos_probe" || have_cos_fig) continue;
        svg::Panel pabs, pmin;
        pabs.title = "|u|";
        pabs.xlabel = "x";
        pabs.ylabel = "|u|";
        pmin.title = "min over grid of |u|";
        pmin.xlabel = "t";
        pmin.ylabel = "min |u|";
        bool have_states = false, have_series = false;
        for (const std::string& out : m.outputs) {
            if (out.ends_with("cos_probe_states.csv")) {
                for (const auto& [t, pts] : slice_states(read_csv(out))) {
                    svg::Series s;
                    s.label = label_t(t);
                    for (const auto& p : pts) {
                        s.x.push_back(p[0]);
                        s.y.push_back(std::hypot(p[1], p[2]));
                    }
                    pabs.series.push_back(std::move(s));
                }
                have_states = true;
            } else if (out.ends_with("cos_probe.csv")) {
                const CsvTable t = read_csv(out);
                svg::Series s;
                s.x = t.column("t");
                s.y = t.column("min_abs_u");
                pmin.series.push_back(std::move(s));
                have_series = true;
            }
        }
        if (have_states && have_series) {
            const std::string path = manifest_dir + "/fig_cos_probe.svg";
            svg::write_svg_grid(path, "Second-order cancellation departs instantly", {pabs, pmin}, 2);
            written.push_back(path);
            have_cos_fig = true;
        }
    }

    return written;
}

} // namespace lognls
