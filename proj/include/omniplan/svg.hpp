#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "omniplan/grid_map.hpp"
#include "omniplan/planner.hpp"

namespace omniplan {

/// Minimal SVG canvas over a world-coordinate viewport (y up).
class SvgCanvas {
  public:
    SvgCanvas(double min_x, double min_y, double max_x, double max_y, double pixels_per_meter = 20.0)
        : min_x_(min_x), min_y_(min_y), max_y_(max_y), scale_(pixels_per_meter),
          width_((max_x - min_x) * pixels_per_meter), height_((max_y - min_y) * pixels_per_meter) {
        body_.precision(6);
    }

    double px(double x) const { return (x - min_x_) * scale_; }
    double py(double y) const { return (max_y_ - y) * scale_; }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ << "<rect x=\"" << px(x) << "\" y=\"" << py(y + h) << "\" width=\"" << w * scale_
              << "\" height=\"" << h * scale_ << "\" fill=\"" << fill << "\"/>\n";
    }

    void line(double x0, double y0, double x1, double y1, const std::string& stroke,
              double width = 1.0) {
        body_ << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1)
              << "\" y2=\"" << py(y1) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width
              << "\"/>\n";
    }

    void circle(double x, double y, double r_meters, const std::string& fill) {
        body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << r_meters * scale_
              << "\" fill=\"" << fill << "\"/>\n";
    }

    template <typename PointRange>
    void polyline(const PointRange& pts, const std::string& stroke, double width = 1.5) {
        if (pts.empty()) return;
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width
              << "\" points=\"";
        for (const auto& p : pts) body_ << px(p.x) << "," << py(p.y) << " ";
        body_ << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, double size_px = 12.0) {
        body_ << "<text x=\"" << px(x) << "\" y=\"" << py(y) << "\" font-size=\"" << size_px
              << "\" font-family=\"monospace\">" << s << "</text>\n";
    }

    /// Elevation as grayscale, obstacles dark red, unknown light gray.
    /// `stride` merges cells to keep file sizes manageable on fine grids.
    void map_layers(const LayeredGridMap& map, int stride = 1) {
        stride = std::max(1, stride);
        double lo = 0.0, hi = 1.0;
        const bool has_elev = map.has_layer("elevation");
        if (has_elev) {
            const auto& e = map.layer("elevation");
            lo = *std::min_element(e.begin(), e.end());
            hi = *std::max_element(e.begin(), e.end());
            if (hi <= lo) hi = lo + 1.0;
        }
        const double res = map.resolution();
        for (int iy = 0; iy < map.height(); iy += stride) {
            for (int ix = 0; ix < map.width(); ix += stride) {
                const CellIndex c{ix, iy};
                std::string fill;
                if (map.has_layer("unknown") && map.at("unknown", c) != 0.0) {
                    fill = "#d8d8d8";
                } else if (map.has_layer("obstacle") && map.at("obstacle", c) != 0.0) {
                    fill = "#7a2020";
                } else if (has_elev) {
                    const int g =
                        64 + static_cast<int>(((map.at("elevation", c) - lo) / (hi - lo)) * 160.0);
                    std::ostringstream color;
                    color << "rgb(" << g << "," << g << "," << g << ")";
                    fill = color.str();
                } else {
                    fill = "#c0c0c0";
                }
                rect(map.cell_x(ix) - res / 2.0, map.cell_y(iy) - res / 2.0, res * stride,
                     res * stride, fill);
            }
        }
    }

    void tree_edges(const Tree& tree, const std::string& stroke = "#4060c0") {
        for (std::size_t i = 1; i < tree.size(); ++i) {
            const Node& n = tree.node(static_cast<int>(i));
            if (n.edge_path.size() >= 2) {
                polyline(n.edge_path, stroke, 0.6);
            } else if (n.parent >= 0) {
                const Pose& p = tree.node(n.parent).pose;
                line(p.x, p.y, n.pose.x, n.pose.y, stroke, 0.6);
            }
        }
    }

    std::string str() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        out << str();
    }

  private:
    double min_x_, min_y_, max_y_, scale_, width_, height_;
    std::ostringstream body_;
};

}  // namespace omniplan
