#pragma once

// Text exports. CSV: `.` decimal separator, LF line endings, mandatory
// header. SVG: viewBox equals the window bounding box, window outline as
// one polygon, one <line> per internal boundary segment.

#include <cstdint>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mecke/continuous.hpp"
#include "mecke/stats.hpp"

namespace mecke {

inline constexpr const char* summary_csv_header = "replication,seed,time,cell_count,boundary_length,area_mean,area_var\n";

inline std::string summary_csv_row(std::size_t replication, std::uint64_t seed, double time, const TessSummary& s) {
    return fmt::format("{},{},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", replication, seed, time, s.cell_count,
                       s.boundary_length, s.area_mean, s.area_var);
}

inline std::string to_svg(const Tessellation& tess) {
    const auto v = tess.window.vertices();
    double x0 = v.front().x, x1 = x0, y0 = v.front().y, y1 = y0;
    for (const auto& q : v) {
        x0 = std::min(x0, q.x);
        x1 = std::max(x1, q.x);
        y0 = std::min(y0, q.y);
        y1 = std::max(y1, q.y);
    }
    const double stroke = 0.002 * tess.window.diameter();

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.17g} {:.17g} {:.17g} {:.17g}\">\n", x0, y0, x1 - x0,
        y1 - y0);
    std::string points;
    for (const auto& q : v) points += fmt::format("{}{:.17g},{:.17g}", points.empty() ? "" : " ", q.x, q.y);
    out += fmt::format("<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.6g}\"/>\n", points,
                       stroke);
    for (const auto& s : tess.cuts) {
        out += fmt::format(
            "<line x1=\"{:.17g}\" y1=\"{:.17g}\" x2=\"{:.17g}\" y2=\"{:.17g}\" stroke=\"black\" stroke-width=\"{:.6g}\"/>\n",
            s.a.x, s.a.y, s.b.x, s.b.y, stroke);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace mecke
