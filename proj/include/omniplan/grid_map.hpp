#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omniplan/geometry.hpp"

namespace omniplan {

struct CellIndex {
    int ix = 0;
    int iy = 0;
    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Uniform multi-layer grid. Scalar layers are stored row-major as doubles;
/// boolean layers ("obstacle", "unknown") use 0.0 / 1.0. The origin is the
/// world position of the center of cell (0, 0).
class LayeredGridMap {
  public:
    LayeredGridMap() = default;
    LayeredGridMap(double resolution, double origin_x, double origin_y, int width, int height)
        : resolution_(resolution), origin_x_(origin_x), origin_y_(origin_y), width_(width),
          height_(height) {
        if (!(resolution > 0.0) || width <= 0 || height <= 0) {
            throw std::domain_error("LayeredGridMap: bad dimensions");
        }
    }

    double resolution() const { return resolution_; }
    double origin_x() const { return origin_x_; }
    double origin_y() const { return origin_y_; }
    int width() const { return width_; }
    int height() const { return height_; }

    void add_layer(const std::string& name, double fill = 0.0) {
        layers_[name].assign(static_cast<std::size_t>(width_) * height_, fill);
    }
    bool has_layer(const std::string& name) const { return layers_.count(name) > 0; }
    std::vector<double>& layer(const std::string& name) {
        auto it = layers_.find(name);
        if (it == layers_.end()) throw std::out_of_range("no layer: " + name);
        return it->second;
    }
    const std::vector<double>& layer(const std::string& name) const {
        auto it = layers_.find(name);
        if (it == layers_.end()) throw std::out_of_range("no layer: " + name);
        return it->second;
    }
    const std::map<std::string, std::vector<double>>& layers() const { return layers_; }

    bool in_bounds(CellIndex c) const {
        return c.ix >= 0 && c.ix < width_ && c.iy >= 0 && c.iy < height_;
    }
    std::size_t index(CellIndex c) const {
        return static_cast<std::size_t>(c.iy) * width_ + c.ix;
    }
    double at(const std::string& name, CellIndex c) const { return layer(name)[index(c)]; }
    void set(const std::string& name, CellIndex c, double v) { layer(name)[index(c)] = v; }

    CellIndex world_to_cell(double x, double y) const {
        return {static_cast<int>(std::lround((x - origin_x_) / resolution_)),
                static_cast<int>(std::lround((y - origin_y_) / resolution_))};
    }
    double cell_x(int ix) const { return origin_x_ + ix * resolution_; }
    double cell_y(int iy) const { return origin_y_ + iy * resolution_; }

    /// A cell is traversable when in bounds, not an obstacle, and known.
    bool traversable(CellIndex c) const {
        if (!in_bounds(c)) return false;
        if (has_layer("unknown") && at("unknown", c) != 0.0) return false;
        if (has_layer("obstacle") && at("obstacle", c) != 0.0) return false;
        return true;
    }
    bool traversable_xy(double x, double y) const { return traversable(world_to_cell(x, y)); }

    double elevation_at(double x, double y) const {
        const CellIndex c = world_to_cell(x, y);
        if (!in_bounds(c) || !has_layer("elevation")) return 0.0;
        return at("elevation", c);
    }

  private:
    double resolution_ = 1.0;
    double origin_x_ = 0.0;
    double origin_y_ = 0.0;
    int width_ = 1;
    int height_ = 1;
    std::map<std::string, std::vector<double>> layers_;
};

struct TraversabilityWeights {
    double k_s = 2.0;  // slope weight
    double k_r = 1.0;  // relative-height weight
    double k_t = 1.0;  // traversability weight in the node cost
};

/// Square sub-map of the given side centered at the cell nearest to `center`.
/// Cells outside the global map are marked unknown. A center outside the map
/// yields an all-unknown local map.
inline LayeredGridMap crop_local(const LayeredGridMap& global, const Pose& center, double side) {
    if (!(side > 0.0)) throw std::domain_error("crop_local: side must be positive");
    const double res = global.resolution();
    const int n = std::max(1, static_cast<int>(std::lround(side / res)));
    const CellIndex cc = global.world_to_cell(center.x, center.y);
    const int lo_x = cc.ix - n / 2;
    const int lo_y = cc.iy - n / 2;

    LayeredGridMap local(res, global.cell_x(lo_x), global.cell_y(lo_y), n, n);
    for (const auto& [name, data] : global.layers()) {
        (void)data;
        local.add_layer(name, 0.0);
    }
    if (!local.has_layer("unknown")) local.add_layer("unknown", 0.0);

    const bool lost = !global.in_bounds(cc);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const CellIndex src{lo_x + ix, lo_y + iy};
            const CellIndex dst{ix, iy};
            if (lost || !global.in_bounds(src)) {
                local.set("unknown", dst, 1.0);
                continue;
            }
            for (const auto& [name, data] : global.layers()) {
                local.set(name, dst, data[global.index(src)]);
            }
        }
    }
    return local;
}

/// Fill (or refresh) the "slope" layer as the gradient magnitude of the
/// elevation layer. Central differences inside, one-sided at borders.
inline LayeredGridMap slope_layer(const LayeredGridMap& map) {
    if (!map.has_layer("elevation")) throw std::domain_error("slope_layer: no elevation layer");
    LayeredGridMap out = map;
    if (!out.has_layer("slope")) out.add_layer("slope", 0.0);
    const double res = map.resolution();
    const auto& e = map.layer("elevation");
    auto& s = out.layer("slope");
    for (int iy = 0; iy < map.height(); ++iy) {
        for (int ix = 0; ix < map.width(); ++ix) {
            const auto v = [&](int jx, int jy) {
                return e[map.index({jx, jy})];
            };
            double gx, gy;
            if (ix == 0) {
                gx = map.width() > 1 ? (v(1, iy) - v(0, iy)) / res : 0.0;
            } else if (ix == map.width() - 1) {
                gx = (v(ix, iy) - v(ix - 1, iy)) / res;
            } else {
                gx = (v(ix + 1, iy) - v(ix - 1, iy)) / (2.0 * res);
            }
            if (iy == 0) {
                gy = map.height() > 1 ? (v(ix, 1) - v(ix, 0)) / res : 0.0;
            } else if (iy == map.height() - 1) {
                gy = (v(ix, iy) - v(ix, iy - 1)) / res;
            } else {
                gy = (v(ix, iy + 1) - v(ix, iy - 1)) / (2.0 * res);
            }
            s[map.index({ix, iy})] = std::hypot(gx, gy);
        }
    }
    return out;
}

/// Integer Bresenham cell trace from a to b, endpoints inclusive.
inline std::vector<CellIndex> bresenham_trace(CellIndex a, CellIndex b) {
    std::vector<CellIndex> cells;
    int dx = std::abs(b.ix - a.ix);
    int dy = std::abs(b.iy - a.iy);
    const int sx = a.ix < b.ix ? 1 : -1;
    const int sy = a.iy < b.iy ? 1 : -1;
    int err = dx - dy;
    CellIndex c = a;
    cells.reserve(static_cast<std::size_t>(std::max(dx, dy)) + 1);
    while (true) {
        cells.push_back(c);
        if (c == b) break;
        const int e2 = 2 * err;
        if (e2 > -dy) {
            err -= dy;
            c.ix += sx;
        }
        if (e2 < dx) {
            err += dx;
            c.iy += sy;
        }
    }
    return cells;
}

inline std::vector<CellIndex> bresenham_trace_checked(const LayeredGridMap& map, CellIndex a,
                                                      CellIndex b) {
    if (!map.in_bounds(a) || !map.in_bounds(b)) {
        throw std::domain_error("bresenham_trace: endpoint out of bounds");
    }
    return bresenham_trace(a, b);
}

struct MaskResult {
    LayeredGridMap map;
    bool robot_in_collision = false;
};

/// Ray-cast from the robot cell to every boundary cell; everything after the
/// first obstacle along each ray becomes unknown. Never unmasks anything.
inline MaskResult mask_beyond_walls(const LayeredGridMap& map, const Pose& robot) {
    if (!map.has_layer("obstacle")) throw std::domain_error("mask_beyond_walls: no obstacle layer");
    MaskResult result{map, false};
    const CellIndex rc = map.world_to_cell(robot.x, robot.y);
    if (!map.in_bounds(rc)) return result;
    if (map.at("obstacle", rc) != 0.0) {
        result.robot_in_collision = true;
        return result;
    }
    if (!result.map.has_layer("unknown")) result.map.add_layer("unknown", 0.0);

    auto cast = [&](CellIndex target) {
        bool blocked = false;
        for (const CellIndex& c : bresenham_trace(rc, target)) {
            if (blocked) {
                result.map.set("unknown", c, 1.0);
            } else if (map.at("obstacle", c) != 0.0) {
                blocked = true;
            }
        }
    };
    for (int ix = 0; ix < map.width(); ++ix) {
        cast({ix, 0});
        cast({ix, map.height() - 1});
    }
    for (int iy = 1; iy < map.height() - 1; ++iy) {
        cast({0, iy});
        cast({map.width() - 1, iy});
    }
    return result;
}

/// Mark cells whose elevation steps more than `threshold` above the robot's
/// standing height as obstacles. Synthetic stand-in for a perceived obstacle
/// layer.
inline LayeredGridMap apply_step_height_obstacles(const LayeredGridMap& map, double z_r,
                                                  double threshold = 0.25) {
    LayeredGridMap out = map;
    if (!out.has_layer("obstacle")) out.add_layer("obstacle", 0.0);
    if (!out.has_layer("elevation")) return out;
    const auto& e = out.layer("elevation");
    auto& obs = out.layer("obstacle");
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] > z_r + threshold || e[i] < z_r - threshold) obs[i] = 1.0;
    }
    return out;
}

/// Dilate the obstacle layer by a disc of the given radius (meters), giving a
/// point-robot planner a real footprint clearance.
inline LayeredGridMap inflate_obstacles(const LayeredGridMap& map, double radius) {
    if (!(radius > 0.0) || !map.has_layer("obstacle")) return map;
    LayeredGridMap out = map;
    const double res = map.resolution();
    const int rr = static_cast<int>(std::ceil(radius / res));
    std::vector<CellIndex> offsets;
    for (int dy = -rr; dy <= rr; ++dy) {
        for (int dx = -rr; dx <= rr; ++dx) {
            if (std::hypot(dx * res, dy * res) <= radius) offsets.push_back({dx, dy});
        }
    }
    const auto& src = map.layer("obstacle");
    auto& dst = out.layer("obstacle");
    for (int iy = 0; iy < map.height(); ++iy) {
        for (int ix = 0; ix < map.width(); ++ix) {
            if (src[map.index({ix, iy})] == 0.0) continue;
            for (const CellIndex& d : offsets) {
                const CellIndex c{ix + d.ix, iy + d.iy};
                if (map.in_bounds(c)) dst[map.index(c)] = 1.0;
            }
        }
    }
    return out;
}

struct PathPoint {
    double x = 0.0;
    double y = 0.0;
};

/// Resample a polyline at one point per `spacing` of arc length. The start is
/// included, the end point is excluded, so concatenated paths do not double
/// count the seam.
inline std::vector<PathPoint> resample_path(const std::vector<PathPoint>& path, double spacing) {
    std::vector<PathPoint> samples;
    if (path.empty() || !(spacing > 0.0)) return samples;
    double carried = 0.0;  // arc length until the next sample
    samples.push_back(path.front());
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const double seg = std::hypot(path[i + 1].x - path[i].x, path[i + 1].y - path[i].y);
        if (seg <= 0.0) continue;
        double s = carried;
        while (s + spacing <= seg) {
            s += spacing;
            const double t = s / seg;
            samples.push_back({path[i].x + t * (path[i + 1].x - path[i].x),
                               path[i].y + t * (path[i + 1].y - path[i].y)});
        }
        carried = s - seg;
    }
    return samples;
}

/// Traversability cost of a path: sum over samples of
/// C_e + k_s C_s + k_r (C_e - z_r). nullopt when any sample lands in an
/// obstacle or unknown cell (untraversable, distinct from a finite cost).
inline std::optional<double> path_traversability(const LayeredGridMap& map, double z_r,
                                                 const std::vector<PathPoint>& path,
                                                 const TraversabilityWeights& w) {
    const auto samples = resample_path(path, map.resolution());
    if (samples.empty()) return 0.0;
    double total = 0.0;
    const bool has_elev = map.has_layer("elevation");
    const bool has_slope = map.has_layer("slope");
    for (const PathPoint& pt : samples) {
        const CellIndex c = map.world_to_cell(pt.x, pt.y);
        if (!map.traversable(c)) return std::nullopt;
        const double ce = has_elev ? map.at("elevation", c) : 0.0;
        const double cs = has_slope ? map.at("slope", c) : 0.0;
        total += ce + w.k_s * cs + w.k_r * (ce - z_r);
    }
    return total;
}

}  // namespace omniplan
