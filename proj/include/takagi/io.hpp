#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "takagi/levelsets.hpp"
#include "takagi/piecewise.hpp"

namespace takagi {

// The effective configuration is echoed into every artifact so a run is
// reproducible from its outputs alone.
using ConfigEcho = std::map<std::string, std::string>;

inline std::string csv_header(const ConfigEcho& config) {
    std::string out;
    for (const auto& [k, v] : config) out += "# " + k + " = " + v + "\n";
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
}

// (x, f_n(x)) rows at full grid resolution, exact decimal expansions.
inline std::string grid_csv(const GridFunction& gf, const ConfigEcho& config) {
    std::string out = csv_header(config);
    out += "x,f\n";
    for (uint64_t j = 0; j <= gf.cell_count(); ++j) {
        out += Dyadic(static_cast<long long>(j), gf.depth()).to_decimal();
        out += ',';
        out += Dyadic(gf.value(j), gf.depth()).to_decimal();
        out += '\n';
    }
    return out;
}

// Minimal static SVG: one polyline over [0,1] x [min,max] plus axis ticks.
inline std::string grid_svg(const GridFunction& gf, const ConfigEcho& config,
                            unsigned width = 800, unsigned height = 500) {
    int64_t vmin = 0, vmax = 1;
    for (uint64_t j = 0; j <= gf.cell_count(); ++j) {
        vmin = std::min<int64_t>(vmin, gf.value(j));
        vmax = std::max<int64_t>(vmax, gf.value(j));
    }
    double scale = static_cast<double>(uint64_t{1} << gf.depth());
    double ymin = static_cast<double>(vmin) / scale, ymax = static_cast<double>(vmax) / scale;
    double span = ymax - ymin;
    const double mx = 40, my = 20;  // margins
    auto px = [&](double x) { return mx + x * (width - 2 * mx); };
    auto py = [&](double y) { return height - my - (y - ymin) / span * (height - 2 * my); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n<!--\n";
    for (const auto& [k, v] : config) svg << k << " = " << v << "\n";
    svg << "-->\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(1) << "\" y2=\""
        << py(ymin) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(0) << "\" y2=\""
        << py(ymax) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double x = t / 4.0;
        svg << "<line x1=\"" << px(x) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(x)
            << "\" y2=\"" << py(ymin) + 4 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(x) << "\" y=\"" << height - 4
            << "\" font-size=\"10\" text-anchor=\"middle\">" << t / 4.0 << "</text>\n";
        double y = ymin + span * t / 4.0;
        svg << "<text x=\"4\" y=\"" << py(y) << "\" font-size=\"10\">" << y << "</text>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\" points=\"";
    for (uint64_t j = 0; j <= gf.cell_count(); ++j) {
        double x = static_cast<double>(j) / scale;
        double y = static_cast<double>(gf.value(j)) / scale;
        svg << px(x) << ',' << py(y) << ' ';
    }
    svg << "\"/>\n</svg>\n";
    return svg.str();
}

inline std::string cover_csv(const CoverReport& report, const ConfigEcho& config) {
    std::string out = csv_header(config);
    out += "depth,count\n";
    for (size_t i = 0; i < report.depths.size(); ++i)
        out += std::to_string(report.depths[i]) + "," + std::to_string(report.counts[i]) + "\n";
    return out;
}

// Surviving intervals as (depth, j) pairs for downstream plotting.
inline std::string cover_cells_csv(const CoverReport& report, const ConfigEcho& config) {
    std::string out = csv_header(config);
    out += "depth,j\n";
    for (const TrackedCell& c : report.final_cells)
        out += std::to_string(report.final_depth) + "," + std::to_string(c.j) + "\n";
    return out;
}

inline nlohmann::json cover_json(const CoverReport& report, const ConfigEcho& config) {
    nlohmann::json j;
    j["config"] = config;
    j["depths"] = report.depths;
    j["counts"] = report.counts;
    j["fitted_dimension"] = report.fitted_dimension;
    j["residual"] = report.residual;
    j["final_count"] = report.counts.empty() ? 0 : report.counts.back();
    return j;
}

}  // namespace takagi
