#ifndef MORASIM_SVG_HPP
#define MORASIM_SVG_HPP

#include <string>
#include <vector>

#include "morasim/trace.hpp"

namespace morasim {

// Dual Gantt chart: m lanes for the offline mirror followed by m lanes for
// the actual schedule. Boxes are labelled "tau<i>,<j>@<speed>".
std::string gantt_svg(const SimTrace& trace);

struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<ChartSeries>& series);

}  // namespace morasim

#endif  // MORASIM_SVG_HPP
