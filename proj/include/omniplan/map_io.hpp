#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <yaml-cpp/yaml.h>

#include "omniplan/grid_map.hpp"

namespace omniplan {

/// FNV-1a over the map geometry and layer contents; used by determinism tests.
inline std::uint64_t map_hash(const LayeredGridMap& map) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    const double geom[4] = {map.resolution(), map.origin_x(), map.origin_y(),
                            static_cast<double>(map.width() * 100000 + map.height())};
    mix(geom, sizeof(geom));
    for (const auto& [name, data] : map.layers()) {
        mix(name.data(), name.size());
        mix(data.data(), data.size() * sizeof(double));
    }
    return h;
}

namespace detail {

inline void write_pgm16(const std::filesystem::path& path, const std::vector<double>& data,
                        int width, int height, double lo, double hi) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << width << " " << height << "\n65535\n";
    const double span = hi > lo ? hi - lo : 1.0;
    for (double v : data) {
        const double t = (v - lo) / span;
        const auto q = static_cast<std::uint16_t>(
            std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
        // PGM stores 16-bit samples most significant byte first.
        out.put(static_cast<char>(q >> 8));
        out.put(static_cast<char>(q & 0xFF));
    }
}

inline std::vector<double> read_pgm16(const std::filesystem::path& path, int& width, int& height,
                                      double lo, double hi) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string magic;
    int maxval = 0;
    in >> magic >> width >> height >> maxval;
    if (magic != "P5" || maxval != 65535) throw std::runtime_error("bad PGM: " + path.string());
    in.get();  // single whitespace after the header
    std::vector<double> data(static_cast<std::size_t>(width) * height);
    for (double& v : data) {
        const int hi_byte = in.get();
        const int lo_byte = in.get();
        if (hi_byte < 0 || lo_byte < 0) throw std::runtime_error("truncated PGM");
        const double t = static_cast<double>((hi_byte << 8) | lo_byte) / 65535.0;
        v = lo + t * (hi - lo);
    }
    return data;
}

}  // namespace detail

/// One 16-bit PGM per layer plus a YAML sidecar with geometry and value
/// ranges.
inline void save_map(const LayeredGridMap& map, const std::filesystem::path& dir,
                     const std::string& name) {
    std::filesystem::create_directories(dir);
    YAML::Emitter y;
    y << YAML::BeginMap;
    y << YAML::Key << "resolution" << YAML::Value << map.resolution();
    y << YAML::Key << "origin_x" << YAML::Value << map.origin_x();
    y << YAML::Key << "origin_y" << YAML::Value << map.origin_y();
    y << YAML::Key << "width" << YAML::Value << map.width();
    y << YAML::Key << "height" << YAML::Value << map.height();
    y << YAML::Key << "layers" << YAML::Value << YAML::BeginSeq;
    for (const auto& [lname, data] : map.layers()) {
        double lo = 0.0, hi = 0.0;
        if (!data.empty()) {
            lo = *std::min_element(data.begin(), data.end());
            hi = *std::max_element(data.begin(), data.end());
        }
        const std::string file = name + "_" + lname + ".pgm";
        detail::write_pgm16(dir / file, data, map.width(), map.height(), lo, hi);
        y << YAML::BeginMap;
        y << YAML::Key << "name" << YAML::Value << lname;
        y << YAML::Key << "file" << YAML::Value << file;
        y << YAML::Key << "min" << YAML::Value << lo;
        y << YAML::Key << "max" << YAML::Value << hi;
        y << YAML::EndMap;
    }
    y << YAML::EndSeq << YAML::EndMap;
    std::ofstream side(dir / (name + ".yaml"));
    side << y.c_str() << "\n";
}

inline LayeredGridMap load_map(const std::filesystem::path& dir, const std::string& name) {
    const YAML::Node side = YAML::LoadFile((dir / (name + ".yaml")).string());
    LayeredGridMap map(side["resolution"].as<double>(), side["origin_x"].as<double>(),
                       side["origin_y"].as<double>(), side["width"].as<int>(),
                       side["height"].as<int>());
    for (const auto& entry : side["layers"]) {
        int w = 0, h = 0;
        auto data = detail::read_pgm16(dir / entry["file"].as<std::string>(), w, h,
                                       entry["min"].as<double>(), entry["max"].as<double>());
        if (w != map.width() || h != map.height()) throw std::runtime_error("layer size mismatch");
        map.add_layer(entry["name"].as<std::string>());
        map.layer(entry["name"].as<std::string>()) = std::move(data);
    }
    return map;
}

/// Debug CSV: one row per cell, columns per layer.
inline void export_map_csv(const LayeredGridMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    out.precision(17);
    out << "ix,iy,x,y";
    for (const auto& [name, data] : map.layers()) {
        (void)data;
        out << "," << name;
    }
    out << "\n";
    for (int iy = 0; iy < map.height(); ++iy) {
        for (int ix = 0; ix < map.width(); ++ix) {
            out << ix << "," << iy << "," << map.cell_x(ix) << "," << map.cell_y(iy);
            for (const auto& [name, data] : map.layers()) {
                (void)name;
                out << "," << data[map.index({ix, iy})];
            }
            out << "\n";
        }
    }
}

}  // namespace omniplan
