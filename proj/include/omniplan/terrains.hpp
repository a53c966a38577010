#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "omniplan/grid_map.hpp"
#include "omniplan/rng.hpp"

namespace omniplan {

/// Truth is what the plant collides with; perceived is what the planner sees.
/// They differ only for scenes with glass walls.
struct Scene {
    LayeredGridMap truth;
    LayeredGridMap perceived;
};

struct WavefieldConfig {
    double amplitude1 = 0.75;    // main humps: 1.5 m peak-to-valley
    double wavelength1 = 12.0;   // meters, along x
    double amplitude2 = 0.125;   // orthogonal ripples: 25 cm peak-to-peak
    double wavelength2 = 3.0;    // meters, along y
    double extent = 40.0;        // square side, meters
    double resolution = 0.25;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Crossed sinusoidal terrain with optional Gaussian roughness.
inline LayeredGridMap gen_wavefield(const WavefieldConfig& cfg) {
    const int n = static_cast<int>(std::lround(cfg.extent / cfg.resolution));
    LayeredGridMap map(cfg.resolution, 0.0, 0.0, n, n);
    map.add_layer("elevation");
    map.add_layer("obstacle");
    map.add_layer("unknown");
    Rng rng(cfg.seed);
    auto& e = map.layer("elevation");
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double x = map.cell_x(ix);
            const double y = map.cell_y(iy);
            // Offset keeps elevations non-negative so summed traversability
            // costs cannot reward long detours.
            double z = cfg.amplitude1 * (1.0 + std::sin(2.0 * M_PI * x / cfg.wavelength1)) +
                       cfg.amplitude2 * (1.0 + std::sin(2.0 * M_PI * y / cfg.wavelength2));
            if (cfg.noise_sigma > 0.0) z += rng.normal(0.0, cfg.noise_sigma);
            e[map.index({ix, iy})] = z;
        }
    }
    return map;
}

/// Axis-aligned walkable rectangle (corridor or room), in world meters.
struct FloorRect {
    double x0, y0, x1, y1;
};

/// A glass partition along a straight segment. Truth keeps every glass cell an
/// obstacle; the perceived map drops every `gap_period`-th cell, leaving the
/// area behind looking reachable.
struct GlassSegment {
    double x0, y0, x1, y1;
    int gap_period = 3;
};

/// A full-thickness blocking wall segment (always an obstacle in both maps).
struct WallSegment {
    double x0, y0, x1, y1;
};

struct CorridorConfig {
    double extent_x = 30.0;
    double extent_y = 30.0;
    double resolution = 0.1;
    double wall_height = 1.5;
    std::vector<FloorRect> floors;
    std::vector<WallSegment> walls;
    std::vector<GlassSegment> glass;
    std::uint64_t seed = 0;
};

inline Scene gen_corridors(const CorridorConfig& cfg) {
    const int w = static_cast<int>(std::lround(cfg.extent_x / cfg.resolution));
    const int h = static_cast<int>(std::lround(cfg.extent_y / cfg.resolution));
    LayeredGridMap truth(cfg.resolution, 0.0, 0.0, w, h);
    truth.add_layer("elevation", cfg.wall_height);
    truth.add_layer("obstacle", 1.0);
    truth.add_layer("unknown", 0.0);

    auto carve = [&](LayeredGridMap& m, const FloorRect& r) {
        const CellIndex a = m.world_to_cell(r.x0, r.y0);
        const CellIndex b = m.world_to_cell(r.x1, r.y1);
        for (int iy = std::max(0, a.iy); iy <= std::min(h - 1, b.iy); ++iy) {
            for (int ix = std::max(0, a.ix); ix <= std::min(w - 1, b.ix); ++ix) {
                m.set("elevation", {ix, iy}, 0.0);
                m.set("obstacle", {ix, iy}, 0.0);
            }
        }
    };
    for (const FloorRect& r : cfg.floors) carve(truth, r);

    auto rasterize = [&](double x0, double y0, double x1, double y1) {
        return bresenham_trace(truth.world_to_cell(x0, y0), truth.world_to_cell(x1, y1));
    };
    for (const WallSegment& s : cfg.walls) {
        for (const CellIndex& c : rasterize(s.x0, s.y0, s.x1, s.y1)) {
            if (!truth.in_bounds(c)) continue;
            truth.set("obstacle", c, 1.0);
            truth.set("elevation", c, cfg.wall_height);
        }
    }

    LayeredGridMap perceived = truth;
    for (const GlassSegment& s : cfg.glass) {
        const auto cells = rasterize(s.x0, s.y0, s.x1, s.y1);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const CellIndex& c = cells[i];
            if (!truth.in_bounds(c)) continue;
            truth.set("obstacle", c, 1.0);
            truth.set("elevation", c, cfg.wall_height);
            if (s.gap_period > 0 && i % static_cast<std::size_t>(s.gap_period) ==
                                        static_cast<std::size_t>(s.gap_period) - 1) {
                // LiDAR punched through here: looks walkable.
                perceived.set("obstacle", c, 0.0);
                perceived.set("elevation", c, 0.0);
            } else {
                perceived.set("obstacle", c, 1.0);
                perceived.set("elevation", c, cfg.wall_height);
            }
        }
    }
    return {std::move(truth), std::move(perceived)};
}

/// Cells that are glass partitions in truth (used by masking diagnostics).
inline std::vector<CellIndex> glass_cells(const CorridorConfig& cfg, const LayeredGridMap& map) {
    std::vector<CellIndex> out;
    for (const GlassSegment& s : cfg.glass) {
        for (const CellIndex& c :
             bresenham_trace(map.world_to_cell(s.x0, s.y0), map.world_to_cell(s.x1, s.y1))) {
            if (map.in_bounds(c)) out.push_back(c);
        }
    }
    return out;
}

struct BoxObstacle {
    double x0, y0, x1, y1;
    double height = 1.0;
};

struct DiscObstacle {
    double x, y, radius;
    double height = 1.0;
};

struct HoleRect {
    double x0, y0, x1, y1;
    double depth = 1.0;
};

struct ClutteredConfig {
    double extent_x = 20.0;
    double extent_y = 20.0;
    double resolution = 0.1;
    double wall_height = 1.5;
    std::vector<BoxObstacle> boxes;
    std::vector<DiscObstacle> discs;
    std::vector<HoleRect> holes;
    std::uint64_t seed = 0;
};

/// Flat room with border walls, box/disc obstacles, and negative-elevation
/// holes.
inline LayeredGridMap gen_cluttered(const ClutteredConfig& cfg) {
    const int w = static_cast<int>(std::lround(cfg.extent_x / cfg.resolution));
    const int h = static_cast<int>(std::lround(cfg.extent_y / cfg.resolution));
    LayeredGridMap map(cfg.resolution, 0.0, 0.0, w, h);
    map.add_layer("elevation", 0.0);
    map.add_layer("obstacle", 0.0);
    map.add_layer("unknown", 0.0);

    auto mark = [&](CellIndex c, double height, bool obstacle) {
        if (!map.in_bounds(c)) return;
        map.set("elevation", c, height);
        map.set("obstacle", c, obstacle ? 1.0 : 0.0);
    };
    for (int ix = 0; ix < w; ++ix) {
        mark({ix, 0}, cfg.wall_height, true);
        mark({ix, h - 1}, cfg.wall_height, true);
    }
    for (int iy = 0; iy < h; ++iy) {
        mark({0, iy}, cfg.wall_height, true);
        mark({w - 1, iy}, cfg.wall_height, true);
    }
    for (const BoxObstacle& b : cfg.boxes) {
        const CellIndex a = map.world_to_cell(b.x0, b.y0);
        const CellIndex z = map.world_to_cell(b.x1, b.y1);
        for (int iy = a.iy; iy <= z.iy; ++iy) {
            for (int ix = a.ix; ix <= z.ix; ++ix) mark({ix, iy}, b.height, true);
        }
    }
    for (const DiscObstacle& d : cfg.discs) {
        const int span = static_cast<int>(std::ceil(d.radius / cfg.resolution)) + 1;
        const CellIndex c = map.world_to_cell(d.x, d.y);
        for (int iy = c.iy - span; iy <= c.iy + span; ++iy) {
            for (int ix = c.ix - span; ix <= c.ix + span; ++ix) {
                if (!map.in_bounds({ix, iy})) continue;
                if (std::hypot(map.cell_x(ix) - d.x, map.cell_y(iy) - d.y) <= d.radius) {
                    mark({ix, iy}, d.height, true);
                }
            }
        }
    }
    for (const HoleRect& hole : cfg.holes) {
        const CellIndex a = map.world_to_cell(hole.x0, hole.y0);
        const CellIndex z = map.world_to_cell(hole.x1, hole.y1);
        for (int iy = a.iy; iy <= z.iy; ++iy) {
            for (int ix = a.ix; ix <= z.ix; ++ix) {
                if (!map.in_bounds({ix, iy})) continue;
                map.set("elevation", {ix, iy}, -hole.depth);
                // Holes are not marked as explicit obstacles; the step-height
                // rule makes them untraversable.
            }
        }
    }
    return map;
}

}  // namespace omniplan
