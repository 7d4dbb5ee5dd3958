#ifndef MCFLAB_SVG_HPP
#define MCFLAB_SVG_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcflab {

// Bare-bones line plots for human inspection. Plots are optional outputs and
// deliberately excluded from manifest hashing: verdicts live in the CSVs.
class SvgPlot {
public:
    SvgPlot(int width = 640, int height = 420, std::string title = {})
        : width_(width), height_(height), title_(std::move(title)) {}

    void add_series(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& color = "steelblue") {
        if (x.size() != y.size() || x.size() < 2)
            throw std::invalid_argument("SvgPlot: series needs >= 2 matching points");
        series_.push_back({x, y, color});
    }

    void write(const std::string& path) const {
        if (series_.empty()) throw std::logic_error("SvgPlot: nothing to plot");
        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const auto& s : series_) {
            for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
            for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
        }
        if (xmax == xmin) xmax = xmin + 1.0;
        if (ymax == ymin) ymax = ymin + 1.0;
        const double mx = 50, my = 30;
        auto px = [&](double x) { return mx + (x - xmin) / (xmax - xmin) * (width_ - 2 * mx); };
        auto py = [&](double y) { return height_ - my - (y - ymin) / (ymax - ymin) * (height_ - 2 * my); };

        std::ofstream out(path);
        if (!out) throw std::runtime_error("SvgPlot: cannot open " + path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
            << "\" height=\"" << height_ << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        if (!title_.empty())
            out << "<text x=\"" << width_ / 2 << "\" y=\"18\" text-anchor=\"middle\" "
                << "font-family=\"sans-serif\" font-size=\"13\">" << title_ << "</text>\n";
        out << "<line x1=\"" << mx << "\" y1=\"" << height_ - my << "\" x2=\"" << width_ - mx
            << "\" y2=\"" << height_ - my << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << mx << "\" y1=\"" << my << "\" x2=\"" << mx << "\" y2=\""
            << height_ - my << "\" stroke=\"black\"/>\n";
        for (const auto& s : series_) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << px(s.x[i]) << "," << py(s.y[i]) << " ";
            out << "\"/>\n";
        }
        out << "</svg>\n";
    }

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
    };
    int width_, height_;
    std::string title_;
    std::vector<Series> series_;
};

} // namespace mcflab

#endif // MCFLAB_SVG_HPP
