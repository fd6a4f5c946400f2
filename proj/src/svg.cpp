#include "metroflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "metroflow/errors.hpp"

namespace metroflow {

namespace {

constexpr int kLeft = 80, kRight = 30, kTop = 40, kBottom = 60;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, int width, int height)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)), width_(width),
      height_(height) {}

void SvgPlot::add_line(std::span<const double> x, std::span<const double> y, std::string color, double stroke_width,
                       std::string label, bool dashed) {
    series_.push_back({{x.begin(), x.end()}, {y.begin(), y.end()}, std::move(color), std::move(label), stroke_width,
                       false, dashed});
}

void SvgPlot::add_points(std::span<const double> x, std::span<const double> y, std::string color, double radius,
                         std::string label) {
    series_.push_back(
        {{x.begin(), x.end()}, {y.begin(), y.end()}, std::move(color), std::move(label), radius, true, false});
}

void SvgPlot::add_hrule(double y, std::string color, std::string label) {
    rules_.push_back({y, std::move(color), std::move(label)});
}

void SvgPlot::set_x_range(double lo, double hi) {
    x_fixed_ = true;
    x_lo_ = lo;
    x_hi_ = hi;
}

void SvgPlot::set_y_range(double lo, double hi) {
    y_fixed_ = true;
    y_lo_ = lo;
    y_hi_ = hi;
}

std::string SvgPlot::render() const {
    double xlo = x_lo_, xhi = x_hi_, ylo = y_lo_, yhi = y_hi_;
    if (!x_fixed_ || !y_fixed_) {
        double ax = std::numeric_limits<double>::infinity(), bx = -ax, ay = ax, by = -ax;
        for (const auto& s : series_) {
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                ax = std::min(ax, s.x[i]);
                bx = std::max(bx, s.x[i]);
                ay = std::min(ay, s.y[i]);
                by = std::max(by, s.y[i]);
            }
        }
        for (const auto& r : rules_) {
            ay = std::min(ay, r.y);
            by = std::max(by, r.y);
        }
        if (!std::isfinite(ax)) ax = 0, bx = 1, ay = 0, by = 1;
        if (bx <= ax) bx = ax + 1;
        if (by <= ay) by = ay + 1;
        if (!x_fixed_) xlo = ax, xhi = bx;
        if (!y_fixed_) {
            const double pad = 0.04 * (by - ay);
            ylo = ay - pad, yhi = by + pad;
        }
    }
    const double pw = width_ - kLeft - kRight;
    const double ph = height_ - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - (y - ylo) / (yhi - ylo)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width_ / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title_)
       << "</text>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xlo + (xhi - xlo) * i / 5.0;
        const double yv = ylo + (yhi - ylo) * i / 5.0;
        os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << height_ - kBottom + 18 << "\" text-anchor=\"middle\">"
           << fmt(xv) << "</text>\n";
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
           << "</text>\n";
    }
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << height_ - 15 << "\" text-anchor=\"middle\">"
       << escape(x_label_) << "</text>\n";
    os << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(y_label_) << "</text>\n";
    os << "<g clip-path=\"url(#plot)\">\n<clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop
       << "\" width=\"" << pw << "\" height=\"" << ph << "\"/></clipPath>\n";
    for (const auto& r : rules_) {
        os << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << fmt(py(r.y)) << "\" y2=\""
           << fmt(py(r.y)) << "\" stroke=\"" << r.color << "\" stroke-width=\"0.8\"/>\n";
    }
    for (const auto& s : series_) {
        if (s.points) {
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"" << s.size
                   << "\" fill=\"" << s.color << "\"/>\n";
            }
        } else if (!s.x.empty()) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << s.size << "\"";
            if (s.dashed) os << " stroke-dasharray=\"6,4\"";
            os << " points=\"";
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
            }
            os << "\"/>\n";
        }
    }
    os << "</g>\n";
    int legend_y = kTop + 16;
    for (const auto& r : rules_) {
        if (r.label.empty()) continue;
        os << "<text x=\"" << kLeft + 4 << "\" y=\"" << fmt(py(r.y) - 3) << "\" fill=\"" << r.color << "\">"
           << escape(r.label) << "</text>\n";
    }
    for (const auto& s : series_) {
        if (s.label.empty()) continue;
        os << "<rect x=\"" << kLeft + pw - 190 << "\" y=\"" << legend_y - 9 << "\" width=\"12\" height=\"4\" fill=\""
           << s.color << "\"/><text x=\"" << kLeft + pw - 172 << "\" y=\"" << legend_y << "\">" << escape(s.label)
           << "</text>\n";
        legend_y += 16;
    }
    os << "</svg>\n";
    return os.str();
}

void SvgPlot::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << render();
}

}  // namespace metroflow
