#pragma once

#include <span>
#include <string>
#include <vector>

namespace metroflow {

// Minimal 2-D chart writer: polylines, scatter markers and horizontal rules over linear axes.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, int width = 900, int height = 560);

    void add_line(std::span<const double> x, std::span<const double> y, std::string color, double stroke_width = 1.2,
                  std::string label = {}, bool dashed = false);
    void add_points(std::span<const double> x, std::span<const double> y, std::string color, double radius = 1.6,
                    std::string label = {});
    void add_hrule(double y, std::string color, std::string label = {});

    // Overrides the automatic data range.
    void set_x_range(double lo, double hi);
    void set_y_range(double lo, double hi);

    [[nodiscard]] std::string render() const;
    void save(const std::string& path) const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string color, label;
        double size;
        bool points;
        bool dashed;
    };
    struct Rule {
        double y;
        std::string color, label;
    };

    std::string title_, x_label_, y_label_;
    int width_, height_;
    std::vector<Series> series_;
    std::vector<Rule> rules_;
    bool x_fixed_ = false, y_fixed_ = false;
    double x_lo_ = 0, x_hi_ = 1, y_lo_ = 0, y_hi_ = 1;
};

}  // namespace metroflow
