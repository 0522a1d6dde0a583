#include "drpt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "drpt/error.hpp"
#include "drpt/numeric.hpp"

namespace drpt {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 64.0, kRight = 24.0, kTop = 40.0, kBottom = 52.0;

std::string fmt(double v) {
    // fixed precision keeps tick labels tidy
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double lo = s.y[i] - (i < s.yerr.size() ? s.yerr[i] : 0.0);
            const double hi = s.y[i] + (i < s.yerr.size() ? s.yerr[i] : 0.0);
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = lo;
                ymax = hi;
                any = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, lo);
                ymax = std::max(ymax, hi);
            }
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double ypad = 0.06 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double x) {
        return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
    };
    auto sy = [&](double y) {
        return kHeight - kBottom - (y - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // axes
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (int t = 0; t <= 5; ++t) {
        const double fx = xmin + (xmax - xmin) * t / 5.0;
        const double fy = ymin + (ymax - ymin) * t / 5.0;
        out << "<line x1=\"" << sx(fx) << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
            << sx(fx) << "\" y2=\"" << kHeight - kBottom + 5
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << sx(fx) << "\" y=\"" << kHeight - kBottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(fx) << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << kLeft
            << "\" y2=\"" << sy(fy) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(fy) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(fy)
            << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << (kTop + kHeight - kBottom) / 2 << ")\">" << y_label
        << "</text>\n";

    double legend_y = kTop + 6.0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << format_double(sx(s.x[i])) << "," << format_double(sy(s.y[i])) << " ";
        }
        out << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << "<circle cx=\"" << format_double(sx(s.x[i])) << "\" cy=\""
                << format_double(sy(s.y[i])) << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
            if (i < s.yerr.size() && s.yerr[i] > 0.0) {
                const double lo = sy(s.y[i] - s.yerr[i]);
                const double hi = sy(s.y[i] + s.yerr[i]);
                const double cx = sx(s.x[i]);
                out << "<line x1=\"" << format_double(cx) << "\" y1=\"" << format_double(lo)
                    << "\" x2=\"" << format_double(cx) << "\" y2=\"" << format_double(hi)
                    << "\" stroke=\"" << s.color << "\" stroke-width=\"1\"/>\n";
                for (double yy : {lo, hi}) {
                    out << "<line x1=\"" << format_double(cx - 3) << "\" y1=\""
                        << format_double(yy) << "\" x2=\"" << format_double(cx + 3)
                        << "\" y2=\"" << format_double(yy) << "\" stroke=\"" << s.color
                        << "\" stroke-width=\"1\"/>\n";
                }
            }
        }
        out << "<rect x=\"" << kWidth - kRight - 150 << "\" y=\"" << legend_y - 9
            << "\" width=\"14\" height=\"4\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << kWidth - kRight - 132 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
        legend_y += 16.0;
    }
    out << "</svg>\n";
    return out.str();
}

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::IoError, "cannot write svg file: " + path);
    out << render_line_chart(title, x_label, y_label, series);
}

} // namespace drpt
