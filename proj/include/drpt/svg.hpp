#pragma once

#include <string>
#include <vector>

namespace drpt {

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr; // half-height of the error bar; may be empty
};

// Minimal line chart with +-1 error bars, written as a standalone SVG file.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series);

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

} // namespace drpt
