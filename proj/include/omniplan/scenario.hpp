#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "omniplan/clf.hpp"
#include "omniplan/geometry.hpp"
#include "omniplan/mission.hpp"
#include "omniplan/planner.hpp"
#include "omniplan/robots.hpp"
#include "omniplan/terrains.hpp"

namespace omniplan {

/// Thrown on invalid or unparsable configuration; the CLI maps it to its
/// config-error exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RateConfig {
    double planning_hz = 5.0;
    double reactive_hz = 300.0;
    double sim_dt = 1.0 / 300.0;

    void validate() const {
        if (!(planning_hz > 0.0) || reactive_hz < planning_hz || sim_dt > 1.0 / reactive_hz + 1e-12) {
            throw ConfigError("rates: need reactive_hz >= planning_hz and sim_dt <= 1/reactive_hz");
        }
    }
};

enum class RobotModel { Omni, Alip };
enum class TerrainKind { Wavefield, Corridors, Cluttered };

struct Disturbance {
    double time = 0.0;  // sim seconds
    double dx = 0.0;
    double dy = 0.0;
    double dtheta = 0.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    TerrainKind terrain_kind = TerrainKind::Cluttered;
    WavefieldConfig wavefield;
    CorridorConfig corridors;
    ClutteredConfig cluttered;

    RobotModel robot = RobotModel::Omni;
    Pose start;
    MissionConfig mission;  // carries the final goal
    PlannerParams planner;  // max_iterations acts as the per-planning-tick budget
    ClfParams clf;
    CommandLimits limits;
    AlipParams alip;
    RateConfig rates;

    double local_map_side = 8.0;    // meters
    double switch_radius = 0.4;     // way-pose advancement radius
    bool use_masking = false;       // mask cells beyond the first wall hit
    double inflation_radius = 0.3;  // obstacle dilation for the robot footprint
    double step_height = 0.25;      // relative-elevation obstacle threshold
    double discontinuity_threshold = 0.5;
    double timeout = 300.0;         // sim seconds
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<Disturbance> disturbances;
};

inline Scene make_scene(const ScenarioConfig& cfg) {
    switch (cfg.terrain_kind) {
        case TerrainKind::Wavefield: {
            LayeredGridMap m = gen_wavefield(cfg.wavefield);
            return {m, m};
        }
        case TerrainKind::Corridors:
            return gen_corridors(cfg.corridors);
        case TerrainKind::Cluttered: {
            LayeredGridMap m = gen_cluttered(cfg.cluttered);
            return {m, m};
        }
    }
    throw ConfigError("unknown terrain kind");
}

inline void validate_scenario(const ScenarioConfig& cfg, const Scene& scene) {
    if (!cfg.seed_set) throw ConfigError(cfg.name + ": seed is mandatory");
    cfg.rates.validate();
    cfg.clf.validate();
    cfg.alip.validate();
    const auto& m = scene.truth;
    if (!m.in_bounds(m.world_to_cell(cfg.start.x, cfg.start.y))) {
        throw ConfigError(cfg.name + ": start outside the map");
    }
    if (!m.in_bounds(m.world_to_cell(cfg.mission.final_goal.x, cfg.mission.final_goal.y))) {
        throw ConfigError(cfg.name + ": goal outside the map");
    }
    if (!(cfg.mission.arc_radius < cfg.local_map_side / 2.0)) {
        throw ConfigError(cfg.name + ": arc_radius must be under half the local map side");
    }
    if (!(cfg.mission.ring_inner < cfg.mission.ring_outer)) {
        throw ConfigError(cfg.name + ": ring_inner must be below ring_outer");
    }
}

// ---------------------------------------------------------------------------
// YAML serialization

namespace detail {

inline Pose yaml_pose(const YAML::Node& n) {
    return {n["x"].as<double>(), n["y"].as<double>(), n["theta"].as<double>(0.0)};
}

inline YAML::Node yaml_pose(const Pose& p) {
    YAML::Node n;
    n["x"] = p.x;
    n["y"] = p.y;
    n["theta"] = p.theta;
    return n;
}

template <typename T>
void opt_read(const YAML::Node& n, const char* key, T& out) {
    if (n[key]) out = n[key].as<T>();
}

}  // namespace detail

inline ScenarioConfig scenario_from_yaml(const YAML::Node& root) {
    ScenarioConfig cfg;
    try {
        detail::opt_read(root, "name", cfg.name);
        if (!root["seed"]) throw ConfigError("scenario: seed is mandatory");
        cfg.seed = root["seed"].as<std::uint64_t>();
        cfg.seed_set = true;

        const YAML::Node terrain = root["terrain"];
        if (!terrain || !terrain["kind"]) throw ConfigError("scenario: terrain.kind missing");
        const auto kind = terrain["kind"].as<std::string>();
        if (kind == "wavefield") {
            cfg.terrain_kind = TerrainKind::Wavefield;
            auto& w = cfg.wavefield;
            detail::opt_read(terrain, "amplitude1", w.amplitude1);
            detail::opt_read(terrain, "wavelength1", w.wavelength1);
            detail::opt_read(terrain, "amplitude2", w.amplitude2);
            detail::opt_read(terrain, "wavelength2", w.wavelength2);
            detail::opt_read(terrain, "extent", w.extent);
            detail::opt_read(terrain, "resolution", w.resolution);
            detail::opt_read(terrain, "noise_sigma", w.noise_sigma);
            w.seed = cfg.seed;
        } else if (kind == "corridors") {
            cfg.terrain_kind = TerrainKind::Corridors;
            auto& c = cfg.corridors;
            detail::opt_read(terrain, "extent_x", c.extent_x);
            detail::opt_read(terrain, "extent_y", c.extent_y);
            detail::opt_read(terrain, "resolution", c.resolution);
            detail::opt_read(terrain, "wall_height", c.wall_height);
            for (const auto& f : terrain["floors"]) {
                c.floors.push_back({f["x0"].as<double>(), f["y0"].as<double>(),
                                    f["x1"].as<double>(), f["y1"].as<double>()});
            }
            for (const auto& wseg : terrain["walls"]) {
                c.walls.push_back({wseg["x0"].as<double>(), wseg["y0"].as<double>(),
                                   wseg["x1"].as<double>(), wseg["y1"].as<double>()});
            }
            for (const auto& g : terrain["glass"]) {
                GlassSegment seg{g["x0"].as<double>(), g["y0"].as<double>(),
                                 g["x1"].as<double>(), g["y1"].as<double>()};
                if (g["gap_period"]) seg.gap_period = g["gap_period"].as<int>();
                c.glass.push_back(seg);
            }
            c.seed = cfg.seed;
        } else if (kind == "cluttered") {
            cfg.terrain_kind = TerrainKind::Cluttered;
            auto& c = cfg.cluttered;
            detail::opt_read(terrain, "extent_x", c.extent_x);
            detail::opt_read(terrain, "extent_y", c.extent_y);
            detail::opt_read(terrain, "resolution", c.resolution);
            detail::opt_read(terrain, "wall_height", c.wall_height);
            for (const auto& b : terrain["boxes"]) {
                BoxObstacle box{b["x0"].as<double>(), b["y0"].as<double>(), b["x1"].as<double>(),
                                b["y1"].as<double>()};
                if (b["height"]) box.height = b["height"].as<double>();
                c.boxes.push_back(box);
            }
            for (const auto& d : terrain["discs"]) {
                DiscObstacle disc{d["x"].as<double>(), d["y"].as<double>(),
                                  d["radius"].as<double>()};
                if (d["height"]) disc.height = d["height"].as<double>();
                c.discs.push_back(disc);
            }
            for (const auto& h : terrain["holes"]) {
                HoleRect hole{h["x0"].as<double>(), h["y0"].as<double>(), h["x1"].as<double>(),
                              h["y1"].as<double>()};
                if (h["depth"]) hole.depth = h["depth"].as<double>();
                c.holes.push_back(hole);
            }
            c.seed = cfg.seed;
        } else {
            throw ConfigError("scenario: unknown terrain kind '" + kind + "'");
        }

        if (root["robot"]) {
            const auto r = root["robot"].as<std::string>();
            if (r == "omni") {
                cfg.robot = RobotModel::Omni;
            } else if (r == "alip") {
                cfg.robot = RobotModel::Alip;
            } else {
                throw ConfigError("scenario: robot must be omni or alip");
            }
        }
        if (!root["start"] || !root["goal"]) throw ConfigError("scenario: start and goal required");
        cfg.start = detail::yaml_pose(root["start"]);
        cfg.mission.final_goal = {root["goal"]["x"].as<double>(), root["goal"]["y"].as<double>()};

        if (const YAML::Node m = root["mission"]) {
            detail::opt_read(m, "arc_radius", cfg.mission.arc_radius);
            detail::opt_read(m, "arc_samples", cfg.mission.arc_samples);
            detail::opt_read(m, "ring_inner", cfg.mission.ring_inner);
            detail::opt_read(m, "ring_outer", cfg.mission.ring_outer);
            detail::opt_read(m, "cluster_linkage_threshold", cfg.mission.cluster_linkage_threshold);
            detail::opt_read(m, "goal_tolerance", cfg.mission.goal_tolerance);
            detail::opt_read(m, "rear_exclusion", cfg.mission.rear_exclusion);
            if (m["intersection_policy"]) {
                const auto p = m["intersection_policy"].as<std::string>();
                if (p == "left") {
                    cfg.mission.intersection_policy = IntersectionPolicy::Left;
                } else if (p == "right") {
                    cfg.mission.intersection_policy = IntersectionPolicy::Right;
                } else if (p == "straight") {
                    cfg.mission.intersection_policy = IntersectionPolicy::Straight;
                } else {
                    throw ConfigError("scenario: bad intersection_policy");
                }
            }
        }
        if (const YAML::Node p = root["planner"]) {
            detail::opt_read(p, "eta", cfg.planner.eta);
            detail::opt_read(p, "xi", cfg.planner.xi);
            detail::opt_read(p, "kappa", cfg.planner.kappa);
            detail::opt_read(p, "t_k", cfg.planner.t_k);
            detail::opt_read(p, "k_t", cfg.planner.k_t);
            detail::opt_read(p, "goal_bias", cfg.planner.goal_bias);
            detail::opt_read(p, "gaussian_sampling_sigma", cfg.planner.gaussian_sampling_sigma);
            detail::opt_read(p, "k_delta", cfg.planner.k_delta);
            detail::opt_read(p, "use_fov_penalty", cfg.planner.use_fov_penalty);
            detail::opt_read(p, "r_stop", cfg.planner.r_stop);
            detail::opt_read(p, "max_iterations", cfg.planner.max_iterations);
            detail::opt_read(p, "max_near", cfg.planner.max_near);
        }
        if (const YAML::Node c = root["clf"]) {
            detail::opt_read(c, "alpha", cfg.clf.alpha);
            detail::opt_read(c, "beta", cfg.clf.beta);
            detail::opt_read(c, "gamma", cfg.clf.gamma);
            detail::opt_read(c, "k_r1", cfg.clf.k_r1);
            detail::opt_read(c, "k_r2", cfg.clf.k_r2);
            detail::opt_read(c, "k_d1", cfg.clf.k_d1);
            detail::opt_read(c, "k_d2", cfg.clf.k_d2);
        }
        if (const YAML::Node l = root["limits"]) {
            detail::opt_read(l, "v_x_min", cfg.limits.v_x_min);
            detail::opt_read(l, "v_x_max", cfg.limits.v_x_max);
            detail::opt_read(l, "v_y_min", cfg.limits.v_y_min);
            detail::opt_read(l, "v_y_max", cfg.limits.v_y_max);
            detail::opt_read(l, "omega_min", cfg.limits.omega_min);
            detail::opt_read(l, "omega_max", cfg.limits.omega_max);
        }
        if (const YAML::Node a = root["alip"]) {
            detail::opt_read(a, "g", cfg.alip.g);
            detail::opt_read(a, "H", cfg.alip.H);
            detail::opt_read(a, "tau", cfg.alip.tau);
            detail::opt_read(a, "tau_jitter", cfg.alip.tau_jitter);
            detail::opt_read(a, "sway_amplitude", cfg.alip.sway_amplitude);
        }
        if (const YAML::Node r = root["rates"]) {
            detail::opt_read(r, "planning_hz", cfg.rates.planning_hz);
            detail::opt_read(r, "reactive_hz", cfg.rates.reactive_hz);
            detail::opt_read(r, "sim_dt", cfg.rates.sim_dt);
        }
        detail::opt_read(root, "local_map_side", cfg.local_map_side);
        detail::opt_read(root, "switch_radius", cfg.switch_radius);
        detail::opt_read(root, "use_masking", cfg.use_masking);
        detail::opt_read(root, "inflation_radius", cfg.inflation_radius);
        detail::opt_read(root, "step_height", cfg.step_height);
        detail::opt_read(root, "discontinuity_threshold", cfg.discontinuity_threshold);
        detail::opt_read(root, "timeout", cfg.timeout);
        for (const auto& d : root["disturbances"]) {
            cfg.disturbances.push_back({d["time"].as<double>(), d["dx"].as<double>(0.0),
                                        d["dy"].as<double>(0.0), d["dtheta"].as<double>(0.0)});
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("scenario yaml: ") + e.what());
    }
    return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("cannot load " + path + ": " + e.what());
    }
    return scenario_from_yaml(root);
}

inline YAML::Node scenario_to_yaml(const ScenarioConfig& cfg) {
    YAML::Node root;
    root["name"] = cfg.name;
    root["seed"] = cfg.seed;
    YAML::Node terrain;
    switch (cfg.terrain_kind) {
        case TerrainKind::Wavefield: {
            terrain["kind"] = "wavefield";
            terrain["amplitude1"] = cfg.wavefield.amplitude1;
            terrain["wavelength1"] = cfg.wavefield.wavelength1;
            terrain["amplitude2"] = cfg.wavefield.amplitude2;
            terrain["wavelength2"] = cfg.wavefield.wavelength2;
            terrain["extent"] = cfg.wavefield.extent;
            terrain["resolution"] = cfg.wavefield.resolution;
            terrain["noise_sigma"] = cfg.wavefield.noise_sigma;
            break;
        }
        case TerrainKind::Corridors: {
            terrain["kind"] = "corridors";
            terrain["extent_x"] = cfg.corridors.extent_x;
            terrain["extent_y"] = cfg.corridors.extent_y;
            terrain["resolution"] = cfg.corridors.resolution;
            terrain["wall_height"] = cfg.corridors.wall_height;
            for (const auto& f : cfg.corridors.floors) {
                YAML::Node n;
                n["x0"] = f.x0;
                n["y0"] = f.y0;
                n["x1"] = f.x1;
                n["y1"] = f.y1;
                terrain["floors"].push_back(n);
            }
            for (const auto& w : cfg.corridors.walls) {
                YAML::Node n;
                n["x0"] = w.x0;
                n["y0"] = w.y0;
                n["x1"] = w.x1;
                n["y1"] = w.y1;
                terrain["walls"].push_back(n);
            }
            for (const auto& g : cfg.corridors.glass) {
                YAML::Node n;
                n["x0"] = g.x0;
                n["y0"] = g.y0;
                n["x1"] = g.x1;
                n["y1"] = g.y1;
                n["gap_period"] = g.gap_period;
                terrain["glass"].push_back(n);
            }
            break;
        }
        case TerrainKind::Cluttered: {
            terrain["kind"] = "cluttered";
            terrain["extent_x"] = cfg.cluttered.extent_x;
            terrain["extent_y"] = cfg.cluttered.extent_y;
            terrain["resolution"] = cfg.cluttered.resolution;
            terrain["wall_height"] = cfg.cluttered.wall_height;
            for (const auto& b : cfg.cluttered.boxes) {
                YAML::Node n;
                n["x0"] = b.x0;
                n["y0"] = b.y0;
                n["x1"] = b.x1;
                n["y1"] = b.y1;
                n["height"] = b.height;
                terrain["boxes"].push_back(n);
            }
            for (const auto& d : cfg.cluttered.discs) {
                YAML::Node n;
                n["x"] = d.x;
                n["y"] = d.y;
                n["radius"] = d.radius;
                n["height"] = d.height;
                terrain["discs"].push_back(n);
            }
            for (const auto& h : cfg.cluttered.holes) {
                YAML::Node n;
                n["x0"] = h.x0;
                n["y0"] = h.y0;
                n["x1"] = h.x1;
                n["y1"] = h.y1;
                n["depth"] = h.depth;
                terrain["holes"].push_back(n);
            }
            break;
        }
    }
    root["terrain"] = terrain;
    root["robot"] = cfg.robot == RobotModel::Alip ? "alip" : "omni";
    root["start"] = detail::yaml_pose(cfg.start);
    YAML::Node goal;
    goal["x"] = cfg.mission.final_goal.x;
    goal["y"] = cfg.mission.final_goal.y;
    root["goal"] = goal;
    YAML::Node m;
    m["arc_radius"] = cfg.mission.arc_radius;
    m["arc_samples"] = cfg.mission.arc_samples;
    m["intersection_policy"] = cfg.mission.intersection_policy == IntersectionPolicy::Left
                                   ? "left"
                                   : cfg.mission.intersection_policy == IntersectionPolicy::Right
                                         ? "right"
                                         : "straight";
    m["ring_inner"] = cfg.mission.ring_inner;
    m["ring_outer"] = cfg.mission.ring_outer;
    m["cluster_linkage_threshold"] = cfg.mission.cluster_linkage_threshold;
    m["goal_tolerance"] = cfg.mission.goal_tolerance;
    m["rear_exclusion"] = cfg.mission.rear_exclusion;
    root["mission"] = m;
    YAML::Node p;
    p["eta"] = cfg.planner.eta;
    p["xi"] = cfg.planner.xi;
    p["kappa"] = cfg.planner.kappa;
    p["t_k"] = cfg.planner.t_k;
    p["k_t"] = cfg.planner.k_t;
    p["goal_bias"] = cfg.planner.goal_bias;
    p["gaussian_sampling_sigma"] = cfg.planner.gaussian_sampling_sigma;
    p["k_delta"] = cfg.planner.k_delta;
    p["use_fov_penalty"] = cfg.planner.use_fov_penalty;
    p["r_stop"] = cfg.planner.r_stop;
    p["max_iterations"] = cfg.planner.max_iterations;
    p["max_near"] = cfg.planner.max_near;
    root["planner"] = p;
    YAML::Node c;
    c["alpha"] = cfg.clf.alpha;
    c["beta"] = cfg.clf.beta;
    c["gamma"] = cfg.clf.gamma;
    c["k_r1"] = cfg.clf.k_r1;
    c["k_r2"] = cfg.clf.k_r2;
    c["k_d1"] = cfg.clf.k_d1;
    c["k_d2"] = cfg.clf.k_d2;
    root["clf"] = c;
    YAML::Node l;
    l["v_x_min"] = cfg.limits.v_x_min;
    l["v_x_max"] = cfg.limits.v_x_max;
    l["v_y_min"] = cfg.limits.v_y_min;
    l["v_y_max"] = cfg.limits.v_y_max;
    l["omega_min"] = cfg.limits.omega_min;
    l["omega_max"] = cfg.limits.omega_max;
    root["limits"] = l;
    YAML::Node a;
    a["g"] = cfg.alip.g;
    a["H"] = cfg.alip.H;
    a["tau"] = cfg.alip.tau;
    a["tau_jitter"] = cfg.alip.tau_jitter;
    a["sway_amplitude"] = cfg.alip.sway_amplitude;
    root["alip"] = a;
    YAML::Node r;
    r["planning_hz"] = cfg.rates.planning_hz;
    r["reactive_hz"] = cfg.rates.reactive_hz;
    r["sim_dt"] = cfg.rates.sim_dt;
    root["rates"] = r;
    root["local_map_side"] = cfg.local_map_side;
    root["switch_radius"] = cfg.switch_radius;
    root["use_masking"] = cfg.use_masking;
    root["inflation_radius"] = cfg.inflation_radius;
    root["step_height"] = cfg.step_height;
    root["discontinuity_threshold"] = cfg.discontinuity_threshold;
    root["timeout"] = cfg.timeout;
    for (const auto& d : cfg.disturbances) {
        YAML::Node n;
        n["time"] = d.time;
        n["dx"] = d.dx;
        n["dy"] = d.dy;
        n["dtheta"] = d.dtheta;
        root["disturbances"].push_back(n);
    }
    return root;
}

// ---------------------------------------------------------------------------
// Sweeps: families of closed-loop CLF trajectories over initial conditions.

struct SweepCase {
    std::string label;
    double r0 = 0.0;         // meters
    double delta0_deg = 0.0; // initial bearing error
    double alpha = 10.0;
};

struct SweepConfig {
    std::string name = "sweep";
    ClfParams clf;
    double dt = 0.01;
    double r_stop = 0.05;
    double max_time = 400.0;
    bool emit_timeseries = false;
    std::vector<SweepCase> cases;
};

// ---------------------------------------------------------------------------
// Bundled presets

inline std::optional<ScenarioConfig> scenario_preset(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.seed = 1;
    cfg.seed_set = true;
    cfg.planner.max_iterations = 100;  // per planning tick
    // Faster radial gains than the reference set; the reference gains crawl at
    // sub-goal ranges. Earlier way-pose switching keeps the speed ramp smooth.
    cfg.clf.k_r1 = 2.5;
    cfg.clf.k_r2 = 2.0;
    cfg.switch_radius = 0.8;

    if (name == "flat") {
        cfg.terrain_kind = TerrainKind::Cluttered;
        cfg.cluttered = {};
        cfg.cluttered.seed = cfg.seed;
        cfg.start = {4.0, 10.0, 0.0};
        cfg.mission.final_goal = {14.0, 10.0};
        cfg.timeout = 120.0;
        return cfg;
    }
    if (name == "wavefield") {
        cfg.terrain_kind = TerrainKind::Wavefield;
        cfg.wavefield = {};
        cfg.wavefield.seed = cfg.seed;
        // Valley floor runs along x = 9 (quarter period past the first crest).
        cfg.start = {9.0, 4.0, M_PI / 2.0};
        cfg.mission.final_goal = {9.0, 34.0};
        cfg.timeout = 400.0;
        return cfg;
    }
    if (name == "corridors-left-turn") {
        cfg.terrain_kind = TerrainKind::Corridors;
        CorridorConfig& c = cfg.corridors;
        c = {};
        c.seed = cfg.seed;
        c.extent_x = 30.0;
        c.extent_y = 30.0;
        // Ring of corridors plus a central cross; 2 m wide everywhere.
        c.floors = {
            {4.0, 4.0, 26.0, 6.0},    // bottom
            {4.0, 24.0, 26.0, 26.0},  // top
            {4.0, 4.0, 6.0, 26.0},    // left
            {24.0, 4.0, 26.0, 26.0},  // right
            {14.0, 4.0, 16.0, 26.0},  // central vertical
            {4.0, 14.0, 26.0, 16.0},  // central horizontal
        };
        // A wall just west of the start blocks the direct route to the goal,
        // forcing the counter-clockwise circuit. Three segments keep the wall
        // thick against path sampling.
        c.walls = {{6.9, 3.9, 6.9, 6.1}, {7.0, 3.9, 7.0, 6.1}, {7.1, 3.9, 7.1, 6.1}};
        cfg.start = {8.5, 5.0, 0.0};
        cfg.mission.final_goal = {6.0, 5.0};
        cfg.mission.intersection_policy = IntersectionPolicy::Left;
        cfg.timeout = 600.0;
        return cfg;
    }
    if (name == "corridors-glass-return") {
        cfg.terrain_kind = TerrainKind::Corridors;
        CorridorConfig& c = cfg.corridors;
        c = {};
        c.seed = cfg.seed;
        c.extent_x = 30.0;
        c.extent_y = 10.0;
        c.floors = {{2.0, 4.0, 28.0, 6.0}};
        // Glass across the corridor; LiDAR misses every third cell.
        c.glass = {{20.0, 3.9, 20.0, 6.1, 3}};
        cfg.start = {6.0, 5.0, 0.0};
        cfg.mission.final_goal = {24.0, 5.0};
        cfg.timeout = 200.0;
        return cfg;
    }
    if (name == "cluttered-room") {
        cfg.terrain_kind = TerrainKind::Cluttered;
        ClutteredConfig& c = cfg.cluttered;
        c = {};
        c.seed = cfg.seed;
        c.extent_x = 20.0;
        c.extent_y = 20.0;
        c.boxes = {{6.0, 3.0, 8.0, 8.0, 1.0}, {12.0, 10.0, 14.0, 15.0, 1.0}};
        c.discs = {{10.5, 6.0, 1.0, 1.0}, {5.0, 13.0, 1.2, 1.0}, {16.0, 5.0, 1.0, 1.0}};
        // The second hole reaches the top wall's inflated band so no pocket
        // the robot could wander into survives between them.
        c.holes = {{8.0, 12.0, 10.0, 14.0, 1.0}, {11.0, 17.5, 14.0, 20.0, 1.0}};
        cfg.start = {2.5, 2.5, M_PI / 4.0};
        cfg.mission.final_goal = {17.5, 17.0};
        // Extra margin: the reactive layer cuts corners between way-poses.
        cfg.inflation_radius = 0.45;
        cfg.timeout = 300.0;
        return cfg;
    }
    return std::nullopt;
}

inline std::optional<SweepConfig> sweep_preset(const std::string& name) {
    SweepConfig cfg;
    cfg.name = name;
    if (name == "alpha-distance") {
        // Three start distances, three yaw-motion penalties, fixed bearing.
        const double distances[] = {2.0 * std::sqrt(2.0), 8.0 * std::sqrt(2.0),
                                    15.0 * std::sqrt(2.0)};
        const double alphas[] = {1.0, 10.0, 100.0};
        for (double r0 : distances) {
            for (double a : alphas) {
                std::string label = "r" + std::to_string(static_cast<int>(std::lround(r0))) +
                                    "_a" + std::to_string(static_cast<int>(a));
                cfg.cases.push_back({label, r0, 60.0, a});
            }
        }
        return cfg;
    }
    if (name == "bearing-fan") {
        for (double d : {-40.0, -20.0, 20.0, 40.0}) {
            cfg.cases.push_back({"d" + std::to_string(static_cast<int>(d)), 15.0, d, 10.0});
        }
        return cfg;
    }
    if (name == "bearing-timeseries") {
        cfg.emit_timeseries = true;
        for (double d : {15.0, 30.0, 45.0, 60.0}) {
            cfg.cases.push_back({"d" + std::to_string(static_cast<int>(d)), 15.0, d, 10.0});
        }
        return cfg;
    }
    return std::nullopt;
}

}  // namespace omniplan
