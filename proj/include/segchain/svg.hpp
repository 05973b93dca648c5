#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace segchain {

/// Minimal line-plot writer: one polyline per series, linear or log-10 y
/// axis, labeled ticks. Enough for the analysis figures; not a charting
/// library.
class LinePlot {
public:
    LinePlot(std::string title, std::string x_label, std::string y_label);

    void add_series(std::string name, std::vector<std::pair<double, double>> points);
    void set_log_y(bool log_y) { log_y_ = log_y; }

    std::string render() const;
    void write(const std::string& path) const;

private:
    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> points;
    };

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    bool log_y_ = false;
};

} // namespace segchain
