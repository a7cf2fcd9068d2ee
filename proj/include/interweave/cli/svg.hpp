#pragma once

// Minimal static SVG charts: line/polygon plots on linear axes and
// categorical heatmaps. Output depends only on the input data.

#include <iosfwd>
#include <string>
#include <vector>

namespace interweave::cli::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool closed = false;  // draw as a polygon outline
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

void write_chart(std::ostream& os, const Chart& chart);

// cells[i * cols + j] indexes `palette`; row i is drawn bottom-up.
struct Heatmap {
    std::string title;
    std::string x_label;
    std::string y_label;
    int rows = 0;
    int cols = 0;
    std::vector<int> cells;
    std::vector<std::string> palette;
    std::vector<std::string> legend;
};

void write_heatmap(std::ostream& os, const Heatmap& map);

} // namespace interweave::cli::svg
