#include "relaytune/cli/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "relaytune/error.hpp"

namespace relaytune::cli {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::size_t kMaxPoints = 2000;

constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#ff7f0e", "#9467bd", "#8c564b"};

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

double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

}  // namespace

void write_svg_chart(std::ostream& out, const std::string& title, std::span<const double> times,
                     std::span<const PlotSeries> series) {
    if (times.size() < 2) throw Error(ErrorKind::InvalidArgument, "chart needs >= 2 samples");
    for (const auto& s : series)
        if (s.values.size() != times.size())
            throw Error(ErrorKind::InvalidArgument, "chart series length mismatch: " + s.name);

    const double t_min = times.front();
    const double t_max = times.back();
    double y_min = INFINITY;
    double y_max = -INFINITY;
    for (const auto& s : series)
        for (double v : s.values) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    if (!std::isfinite(y_min)) y_min = y_max = 0.0;
    if (y_max - y_min < 1e-9) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double t) { return kLeft + (t - t_min) / (t_max - t_min) * plot_w; };
    auto py = [&](double v) { return kTop + (y_max - v) / (y_max - y_min) * plot_h; };

    out << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight);
    out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth,
                       kHeight);
    out << fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       kLeft + plot_w / 2, escape(title));

    // Axes and grid.
    out << "<g stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
    const double tx = nice_step(t_max - t_min);
    for (double t = std::ceil(t_min / tx) * tx; t <= t_max + 1e-9; t += tx)
        out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n",
                           px(t), kTop, kTop + plot_h);
    const double ty = nice_step(y_max - y_min);
    for (double v = std::ceil(y_min / ty) * ty; v <= y_max + 1e-12; v += ty)
        out << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n",
                           kLeft, py(v), kLeft + plot_w);
    out << "</g>\n";
    out << fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
        kTop, plot_w, plot_h);
    for (double t = std::ceil(t_min / tx) * tx; t <= t_max + 1e-9; t += tx)
        out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n",
                           px(t), kTop + plot_h + 16, std::abs(t) < 1e-12 ? 0.0 : t);
    for (double v = std::ceil(y_min / ty) * ty; v <= y_max + 1e-12; v += ty)
        out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n",
                           kLeft - 6, py(v) + 4, std::abs(v) < 1e-12 ? 0.0 : v);
    out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">time [s]</text>\n",
                       kLeft + plot_w / 2, kHeight - 12);

    const std::size_t stride = std::max<std::size_t>(1, times.size() / kMaxPoints);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % kColors.size()];
        out << fmt::format("<polyline data-series=\"{}\" fill=\"none\" stroke=\"{}\" "
                           "stroke-width=\"1.5\" points=\"",
                           escape(series[i].name), color);
        for (std::size_t k = 0; k < times.size(); k += stride) {
            const double v = std::clamp(series[i].values[k], y_min, y_max);
            out << fmt::format("{:.2f},{:.2f} ", px(times[k]), py(v));
        }
        out << fmt::format("{:.2f},{:.2f}", px(times.back()),
                           py(std::clamp(series[i].values.back(), y_min, y_max)));
        out << "\"/>\n";

        const double ly = kTop + 14 + 20.0 * static_cast<double>(i);
        const double lx = kLeft + plot_w + 15;
        out << fmt::format(
            "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
            "stroke-width=\"2\"/>\n",
            lx, ly, lx + 24, ly, color);
        out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", lx + 30, ly + 4,
                           escape(series[i].name));
    }
    out << "</svg>\n";
}

}  // namespace relaytune::cli
