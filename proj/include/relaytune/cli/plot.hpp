#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace relaytune::cli {

struct PlotSeries {
    std::string name;
    std::vector<double> values;  ///< one per time sample
};

/// Writes a standalone SVG line chart: axes with ticks, a legend and one
/// polyline per series. Output is deterministic for identical input.
void write_svg_chart(std::ostream& out, const std::string& title, std::span<const double> times,
                     std::span<const PlotSeries> series);

}  // namespace relaytune::cli
