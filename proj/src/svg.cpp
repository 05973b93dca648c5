#include "segchain/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "segchain/errors.hpp"

namespace segchain {

namespace {

constexpr int kWidth = 760;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 90;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 46;
constexpr int kMarginBottom = 64;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

LinePlot::LinePlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void LinePlot::add_series(std::string name, std::vector<std::pair<double, double>> points) {
    series_.push_back(Series{std::move(name), std::move(points)});
}

std::string LinePlot::render() const {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series_) {
        for (auto [x, y] : s.points) {
            double yy = log_y_ ? std::log10(std::max(y, 1e-300)) : y;
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, yy);
            y_max = std::max(y_max, yy);
        }
    }
    if (!(x_min < x_max)) {
        x_min -= 1;
        x_max += 1;
    }
    if (!(y_min < y_max)) {
        y_min -= 1;
        y_max += 1;
    }

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto sx = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto sy = [&](double y) {
        double yy = log_y_ ? std::log10(std::max(y, 1e-300)) : y;
        return kMarginTop + plot_h - (yy - y_min) / (y_max - y_min) * plot_h;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

    // axes
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        double fx = x_min + (x_max - x_min) * i / ticks;
        double px = sx(fx);
        out << "<line x1=\"" << px << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\"" << px
            << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << kMarginTop + plot_h + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(fx) << "</text>\n";

        double fy = y_min + (y_max - y_min) * i / ticks;
        double py = kMarginTop + plot_h - (fy - y_min) / (y_max - y_min) * plot_h;
        out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kMarginLeft
            << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(log_y_ ? std::pow(10.0, fy) : fy) << "</text>\n";
    }

    out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label_
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << kMarginTop + plot_h / 2 << ")\">" << y_label_
        << "</text>\n";

    for (std::size_t i = 0; i < series_.size(); ++i) {
        const auto& s = series_[i];
        const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (auto [x, y] : s.points)
            out << fmt(sx(x)) << "," << fmt(sy(y)) << " ";
        out << "\"/>\n";
        double ly = kMarginTop + 16.0 * (double(i) + 1);
        out << "<line x1=\"" << kMarginLeft + plot_w - 150 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << kMarginLeft + plot_w - 130 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kMarginLeft + plot_w - 124 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.name << "</text>\n";
    }

    out << "</svg>\n";
    return out.str();
}

void LinePlot::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        raise(Errc::io_error, "cannot open " + path);
    out << render();
    if (!out)
        raise(Errc::io_error, "write failed: " + path);
}

} // namespace segchain
