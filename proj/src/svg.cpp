#include "morasim/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace morasim {

namespace {

constexpr std::array<const char*, 10> kPalette{"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                               "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string escape(const std::string& s) {
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

std::string speed_label(const Speed& s) {
    std::string d = s.decimal(3);
    while (d.find('.') != std::string::npos && (d.back() == '0' || d.back() == '.')) d.pop_back();
    return d;
}

// Tick spacing from {1, 2, 5} x 10^k giving at most ~10 ticks.
double tick_step(double span) {
    if (span <= 0) return 1;
    const double raw = span / 10;
    const double base = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 5.0, 10.0})
        if (f * base >= raw) return f * base;
    return 10 * base;
}

}  // namespace

std::string gantt_svg(const SimTrace& trace) {
    const double left = 110;
    const double plot_width = 900;
    const double lane_height = 36;
    const double top = 30;
    const std::size_t lanes = 2 * trace.processors;
    const double height = top + lanes * lane_height + 40;
    const double horizon = std::max(trace.horizon.to_double(), 1e-9);
    auto x = [&](const Time& t) { return left + plot_width * t.to_double() / horizon; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + plot_width + 20 << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">" << escape(trace.policy) << " on "
        << trace.processors << " processor(s), horizon " << trace.horizon << "</text>\n";

    for (std::size_t lane = 0; lane < lanes; ++lane) {
        const bool offline = lane < trace.processors;
        const std::size_t p = lane % std::max<std::size_t>(trace.processors, 1);
        const double y = top + lane * lane_height;
        svg << "<g class=\"lane\" data-schedule=\"" << (offline ? "offline" : "actual") << "\" data-proc=\"" << p + 1
            << "\">\n";
        svg << "<rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << plot_width << "\" height=\""
            << lane_height - 4 << "\" fill=\"" << (offline ? "#f4f4f4" : "#ffffff") << "\" stroke=\"#999\"/>\n";
        svg << "<text x=\"4\" y=\"" << y + lane_height / 2 + 2 << "\">P" << p + 1
            << (offline ? " offline" : " actual") << "</text>\n";
        const auto& list = offline ? trace.offline_intervals : trace.intervals;
        for (const auto& iv : list) {
            if (iv.proc != p) continue;
            const double x0 = x(iv.start);
            const double w = std::max(x(iv.end) - x0, 0.5);
            const std::string label = "τ" + std::to_string(iv.job.task) + "," + std::to_string(iv.job.index) +
                                      "@" + speed_label(iv.speed);
            svg << "<g class=\"box\" data-start=\"" << iv.start << "\" data-end=\"" << iv.end << "\">"
                << "<rect x=\"" << x0 << "\" y=\"" << y + 2 << "\" width=\"" << w << "\" height=\""
                << lane_height - 8 << "\" fill=\""
                << kPalette[static_cast<std::size_t>(std::abs(iv.job.task)) % kPalette.size()]
                << "\" stroke=\"#333\"><title>" << escape(label) << " [" << iv.start << ", " << iv.end
                << ")</title></rect>";
            if (w > 6.0 * static_cast<double>(label.size()) * 0.8)
                svg << "<text x=\"" << x0 + 3 << "\" y=\"" << y + lane_height / 2 + 2 << "\">" << escape(label)
                    << "</text>";
            svg << "</g>\n";
        }
        svg << "</g>\n";
    }

    const double axis_y = top + lanes * lane_height + 4;
    const double step = tick_step(horizon);
    for (double t = 0; t <= horizon + 1e-9; t += step) {
        const double xt = left + plot_width * t / horizon;
        svg << "<line x1=\"" << xt << "\" y1=\"" << axis_y << "\" x2=\"" << xt << "\" y2=\"" << axis_y + 5
            << "\" stroke=\"#333\"/><text x=\"" << xt - 4 << "\" y=\"" << axis_y + 17 << "\">" << t << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<ChartSeries>& series) {
    const double left = 70;
    const double top = 40;
    const double w = 520;
    const double h = 320;
    double x_min = 0;
    double x_max = 1;
    double y_min = 0;
    double y_max = 1;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [px, py] : s.points) {
            if (first) {
                x_min = x_max = px;
                y_min = y_max = py;
                first = false;
            }
            x_min = std::min(x_min, px);
            x_max = std::max(x_max, px);
            y_min = std::min(y_min, py);
            y_max = std::max(y_max, py);
        }
    y_min = std::min(y_min, 0.0);
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;
    y_max += (y_max - y_min) * 0.05;
    auto sx = [&](double v) { return left + w * (v - x_min) / (x_max - x_min); };
    auto sy = [&](double v) { return top + h - h * (v - y_min) / (y_max - y_min); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + w + 160 << "\" height=\"" << top + h + 50
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << escape(title) << "</text>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    const double ystep = tick_step(y_max - y_min);
    for (double v = std::ceil(y_min / ystep) * ystep; v <= y_max + 1e-9; v += ystep)
        svg << "<line x1=\"" << left << "\" y1=\"" << sy(v) << "\" x2=\"" << left + w << "\" y2=\"" << sy(v)
            << "\" stroke=\"#ddd\"/><text x=\"" << left - 40 << "\" y=\"" << sy(v) + 4 << "\">" << v << "</text>\n";
    const double xstep = tick_step(x_max - x_min);
    for (double v = std::ceil(x_min / xstep) * xstep; v <= x_max + 1e-9; v += xstep)
        svg << "<text x=\"" << sx(v) - 8 << "\" y=\"" << top + h + 16 << "\">" << v << "</text>\n";
    svg << "<text x=\"" << left + w / 2 - 20 << "\" y=\"" << top + h + 38 << "\">" << escape(x_label) << "</text>\n";
    svg << "<text x=\"14\" y=\"" << top + h / 2 << "\" transform=\"rotate(-90 14 " << top + h / 2 << ")\">"
        << escape(y_label) << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % kPalette.size()];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [px, py] : series[i].points) svg << sx(px) << "," << sy(py) << " ";
        svg << "\"/>\n";
        for (const auto& [px, py] : series[i].points)
            svg << "<circle cx=\"" << sx(px) << "\" cy=\"" << sy(py) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double ly = top + 14 + 18 * static_cast<double>(i);
        svg << "<line x1=\"" << left + w + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + w + 32 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << left + w + 36 << "\" y=\"" << ly + 4
            << "\">" << escape(series[i].name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace morasim
