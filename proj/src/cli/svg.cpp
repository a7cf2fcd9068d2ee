#include "interweave/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "interweave/csv.hpp"

namespace interweave::cli::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

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

std::string num(double v) {
    // Two decimals is plenty for pixel coordinates and keeps files stable.
    return format_double(std::round(v * 100.0) / 100.0);
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void header(std::ostream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(title) << "</text>\n";
}

void axes(std::ostream& os, const std::string& xl, const std::string& yl, double x0, double x1,
          double y0, double y1) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = kLeft + pw * k / 4.0;
        const double fy = kTop + ph - ph * k / 4.0;
        os << "<text x=\"" << num(fx) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">"
           << tick(x0 + (x1 - x0) * k / 4.0) << "</text>\n";
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(fy + 4) << "\" text-anchor=\"end\">"
           << tick(y0 + (y1 - y0) * k / 4.0) << "</text>\n";
    }
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
       << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
    os << "<text transform=\"translate(16," << num(kTop + ph / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

void legend_entry(std::ostream& os, int index, const std::string& color, const std::string& label) {
    const double y = kTop + 10 + 18 * index;
    const double x = kWidth - kRight + 12;
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 8) << "\" width=\"12\" height=\"10\" fill=\""
       << color << "\"/>\n";
    os << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y + 1) << "\">" << escape(label) << "</text>\n";
}

} // namespace

void write_chart(std::ostream& os, const Chart& chart) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    y0 = std::min(y0, 0.0);
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + pw * (x - x0) / (x1 - x0); };
    auto py = [&](double y) { return kTop + ph - ph * (y - y0) / (y1 - y0); };

    header(os, chart.title);
    axes(os, chart.x_label, chart.y_label, x0, x1, y0, y1);
    int index = 0;
    for (const auto& s : chart.series) {
        const std::string color = kColors[index % 8];
        os << '<' << (s.closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) os << ' ';
            os << num(px(s.x[i])) << ',' << num(py(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
        legend_entry(os, index, color, s.name);
        ++index;
    }
    os << "</svg>\n";
}

void write_heatmap(std::ostream& os, const Heatmap& map) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    header(os, map.title);
    const double cw = pw / std::max(map.cols, 1);
    const double ch = ph / std::max(map.rows, 1);
    for (int i = 0; i < map.rows; ++i) {
        for (int j = 0; j < map.cols; ++j) {
            const int v = map.cells[static_cast<std::size_t>(i) * map.cols + j];
            const std::string& color = map.palette.at(static_cast<std::size_t>(v));
            os << "<rect x=\"" << num(kLeft + j * cw) << "\" y=\"" << num(kTop + ph - (i + 1) * ch)
               << "\" width=\"" << num(cw + 0.01) << "\" height=\"" << num(ch + 0.01) << "\" fill=\""
               << color << "\"/>\n";
        }
    }
    axes(os, map.x_label, map.y_label, 0.0, 1.0, 0.0, 1.0);
    for (std::size_t k = 0; k < map.legend.size() && k < map.palette.size(); ++k) {
        legend_entry(os, static_cast<int>(k), map.palette[k], map.legend[k]);
    }
    os << "</svg>\n";
}

} // namespace interweave::cli::svg
