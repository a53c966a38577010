// Command-line front end: run scenarios, sweep the steering law, render plots,
// dump generated maps, and bridge commands/poses over UDP.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omniplan/omniplan.hpp"

namespace {

namespace fs = std::filesystem;
using namespace omniplan;

constexpr int kExitSuccess = 0;
constexpr int kExitMissionFailure = 2;
constexpr int kExitConfigError = 3;

fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("OMNIPLAN_OUT")) {
        if (*env) return env;
    }
    return "out";
}

ScenarioConfig resolve_scenario(const std::string& preset, const std::string& config_path,
                                std::optional<std::uint64_t> seed_override) {
    ScenarioConfig cfg;
    if (!config_path.empty()) {
        cfg = load_scenario(config_path);
    } else if (!preset.empty()) {
        auto p = scenario_preset(preset);
        if (!p) throw ConfigError("unknown scenario preset: " + preset);
        cfg = *p;
    } else {
        throw ConfigError("either --preset or --config is required");
    }
    if (seed_override) {
        cfg.seed = *seed_override;
        cfg.seed_set = true;
        cfg.wavefield.seed = cfg.seed;
        cfg.corridors.seed = cfg.seed;
        cfg.cluttered.seed = cfg.seed;
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

void render_run_svg(const ScenarioConfig& cfg, const Scene& scene, const RunResult& result,
                    const fs::path& path) {
    const auto& m = scene.truth;
    const double half = m.resolution() / 2.0;
    SvgCanvas svg(m.origin_x() - half, m.origin_y() - half,
                  m.origin_x() + (m.width() - 1) * m.resolution() + half,
                  m.origin_y() + (m.height() - 1) * m.resolution() + half);
    svg.map_layers(m, std::max(1, m.width() / 200));
    svg.polyline(result.trajectory, "#d04000", 2.0);
    svg.circle(cfg.start.x, cfg.start.y, 0.2, "#008000");
    svg.circle(cfg.mission.final_goal.x, cfg.mission.final_goal.y, 0.2, "#0000c0");
    svg.save(path.string());
}

int cmd_run(const ScenarioConfig& cfg, const fs::path& out_dir, bool quiet) {
    const Scene scene = make_scene(cfg);
    validate_scenario(cfg, scene);
    const RunResult result = run_scenario(cfg);

    fs::create_directories(out_dir);
    write_file(out_dir / "report.json", result.report.to_json() + "\n");
    write_file(out_dir / "trajectory.csv", trajectory_to_csv(result.trajectory));
    std::ostringstream events;
    for (const auto& line : result.events) events << line << "\n";
    write_file(out_dir / "events.jsonl", events.str());
    {
        YAML::Emitter y;
        y << scenario_to_yaml(cfg);
        write_file(out_dir / "scenario.yaml", std::string(y.c_str()) + "\n");
    }
    save_map(scene.truth, out_dir / "maps", "truth");
    save_map(scene.perceived, out_dir / "maps", "perceived");
    render_run_svg(cfg, scene, result, out_dir / "trajectory.svg");

    if (!quiet) {
        std::cout << result.report.to_json() << "\n";
    }
    return result.exit_code();
}

SweepConfig resolve_sweep(const std::string& preset, const std::string& config_path) {
    if (!config_path.empty()) {
        YAML::Node root;
        try {
            root = YAML::LoadFile(config_path);
        } catch (const YAML::Exception& e) {
            throw ConfigError("cannot load " + config_path + ": " + e.what());
        }
        SweepConfig cfg;
        if (root["name"]) cfg.name = root["name"].as<std::string>();
        if (root["dt"]) cfg.dt = root["dt"].as<double>();
        if (root["r_stop"]) cfg.r_stop = root["r_stop"].as<double>();
        if (root["max_time"]) cfg.max_time = root["max_time"].as<double>();
        if (root["emit_timeseries"]) cfg.emit_timeseries = root["emit_timeseries"].as<bool>();
        if (const YAML::Node c = root["clf"]) {
            if (c["alpha"]) cfg.clf.alpha = c["alpha"].as<double>();
            if (c["beta"]) cfg.clf.beta = c["beta"].as<double>();
            if (c["gamma"]) cfg.clf.gamma = c["gamma"].as<double>();
        }
        for (const auto& n : root["cases"]) {
            cfg.cases.push_back({n["label"].as<std::string>(), n["r0"].as<double>(),
                                 n["delta0_deg"].as<double>(), n["alpha"].as<double>(10.0)});
        }
        if (cfg.cases.empty()) throw ConfigError("sweep: no cases");
        return cfg;
    }
    if (preset.empty()) throw ConfigError("either --preset or --config is required");
    auto p = sweep_preset(preset);
    if (!p) throw ConfigError("unknown sweep preset: " + preset);
    return *p;
}

int cmd_sweep(const SweepConfig& cfg, const fs::path& out_dir, bool quiet) {
    fs::create_directories(out_dir);
    double extent = 1.0;
    for (const auto& c : cfg.cases) extent = std::max(extent, c.r0 * 1.2);
    SvgCanvas svg(-extent, -extent, extent, extent, std::max(4.0, 600.0 / (2.0 * extent)));
    svg.circle(0.0, 0.0, extent / 120.0, "#0000c0");

    const std::vector<std::string> palette = {"#d04000", "#008000", "#4060c0", "#a000a0",
                                              "#807000", "#008080", "#703030", "#303070",
                                              "#507010"};
    std::ostringstream summary;
    summary.precision(12);
    summary << "[";
    for (std::size_t i = 0; i < cfg.cases.size(); ++i) {
        const SweepCase& sc = cfg.cases[i];
        ClfParams p = cfg.clf;
        p.alpha = sc.alpha;
        const double d0 = sc.delta0_deg * M_PI / 180.0;
        const Pose start{0.0, 0.0, 0.0};
        const GoalPosition goal{sc.r0 * std::cos(d0), sc.r0 * std::sin(d0)};
        const auto steps = static_cast<std::size_t>(cfg.max_time / cfg.dt);
        const ClosedLoopResult run =
            simulate_closed_loop(start, goal, p, cfg.dt, cfg.r_stop, steps);

        std::ostringstream csv;
        csv.precision(17);
        csv << "t,x,y,theta,v_x,v_y,omega,r,delta\n";
        std::vector<Pose> pts;
        for (const auto& s : run.samples) {
            const EgoPolarState eps = to_egopolar(s.pose, goal);
            csv << s.t << "," << s.pose.x << "," << s.pose.y << "," << s.pose.theta << ","
                << s.command.v_x << "," << s.command.v_y << "," << s.command.omega << "," << eps.r
                << "," << eps.delta << "\n";
            pts.push_back(s.pose);
        }
        write_file(out_dir / (sc.label + ".csv"), csv.str());
        // Plot each family relative to its own goal placed at the origin so
        // the trajectories are comparable.
        std::vector<Pose> rel;
        rel.reserve(pts.size());
        for (const Pose& q : pts) rel.push_back({q.x - goal.x, q.y - goal.y, q.theta});
        svg.polyline(rel, palette[i % palette.size()], 1.5);

        double turned = 0.0;
        for (std::size_t k = 0; k + 1 < run.samples.size(); ++k) {
            turned += run.samples[k].command.omega * cfg.dt;
        }
        if (i) summary << ",";
        summary << "{\"label\":\"" << sc.label << "\",\"r0\":" << sc.r0
                << ",\"delta0_deg\":" << sc.delta0_deg << ",\"alpha\":" << sc.alpha
                << ",\"converged\":" << (run.converged ? "true" : "false")
                << ",\"duration\":" << run.samples.back().t << ",\"net_heading\":" << turned
                << "}";
        if (!quiet) {
            std::cout << sc.label << ": converged=" << run.converged
                      << " t=" << run.samples.back().t << "s net_heading=" << turned << " rad\n";
        }
    }
    summary << "]\n";
    write_file(out_dir / "summary.json", summary.str());
    svg.save((out_dir / (cfg.name + ".svg")).string());
    return kExitSuccess;
}

int cmd_plot(const ScenarioConfig& cfg, const std::string& traj_csv, const fs::path& out_file) {
    const Scene scene = make_scene(cfg);
    RunResult fake;
    if (!traj_csv.empty()) {
        std::ifstream in(traj_csv);
        if (!in) throw ConfigError("cannot read " + traj_csv);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            TrajectoryRow row;
            std::istringstream ls(line);
            char comma;
            ls >> row.t >> comma >> row.x >> comma >> row.y >> comma >> row.theta;
            if (ls) fake.trajectory.push_back(row);
        }
    }
    fs::create_directories(out_file.parent_path().empty() ? "." : out_file.parent_path());
    render_run_svg(cfg, scene, fake, out_file);
    return kExitSuccess;
}

int cmd_gen_map(const ScenarioConfig& cfg, const fs::path& out_dir, bool quiet) {
    const Scene scene = make_scene(cfg);
    validate_scenario(cfg, scene);
    fs::create_directories(out_dir);
    save_map(scene.truth, out_dir, "truth");
    save_map(scene.perceived, out_dir, "perceived");
    export_map_csv(scene.truth, out_dir / "truth.csv");
    if (!quiet) {
        std::cout << "truth hash: " << map_hash(scene.truth)
                  << "\nperceived hash: " << map_hash(scene.perceived) << "\n";
    }
    return kExitSuccess;
}

// Planner side of the UDP link: consumes pose datagrams, answers each with the
// current reactive command; planning runs on a wall-clock timer.
int cmd_bridge(const ScenarioConfig& cfg, int listen_port, const std::string& peer_host,
               int peer_port, double duration_s, bool quiet) {
    const Scene scene = make_scene(cfg);
    validate_scenario(cfg, scene);

    const int sock = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (sock < 0) {
        std::cerr << "bridge: cannot open socket\n";
        return kExitMissionFailure;
    }
    sockaddr_in local{};
    local.sin_family = AF_INET;
    local.sin_addr.s_addr = htonl(INADDR_ANY);
    local.sin_port = htons(static_cast<std::uint16_t>(listen_port));
    if (::bind(sock, reinterpret_cast<sockaddr*>(&local), sizeof(local)) < 0) {
        std::cerr << "bridge: cannot bind port " << listen_port << "\n";
        ::close(sock);
        return kExitMissionFailure;
    }
    timeval tv{0, 100000};  // 100 ms receive timeout
    ::setsockopt(sock, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));

    sockaddr_in peer{};
    peer.sin_family = AF_INET;
    peer.sin_port = htons(static_cast<std::uint16_t>(peer_port));
    if (::inet_pton(AF_INET, peer_host.c_str(), &peer.sin_addr) != 1) {
        std::cerr << "bridge: bad peer address " << peer_host << "\n";
        ::close(sock);
        return kExitMissionFailure;
    }

    PlannerLoopState st;
    Rng rng(cfg.seed);
    SequenceGate gate;
    std::uint32_t out_seq = 0;
    Pose robot = cfg.start;
    bool have_pose = false;

    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    auto last_plan = t0 - std::chrono::hours(1);
    const auto plan_period =
        std::chrono::duration<double>(1.0 / cfg.rates.planning_hz);

    int code = kExitMissionFailure;
    while (std::chrono::duration<double>(Clock::now() - t0).count() < duration_s) {
        std::uint8_t buf[64];
        const auto n = ::recv(sock, buf, sizeof(buf), 0);
        const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        if (n > 0) {
            if (const auto pose = udp_decode_pose(buf, static_cast<std::size_t>(n))) {
                if (gate.accept(pose->seq)) {
                    robot = pose->pose;
                    have_pose = true;
                }
            }
        }
        if (!have_pose) continue;

        if (Clock::now() - last_plan >= plan_period) {
            const double z_r = scene.perceived.elevation_at(robot.x, robot.y);
            planning_tick(st, robot, scene.perceived, z_r, cfg, rng, elapsed, nullptr);
            last_plan = Clock::now();
            if (st.goal_reached) {
                code = kExitSuccess;
                break;
            }
            if (st.mission_failed) break;
        }

        Command cmd;
        if (st.turn_omega) {
            cmd = clamp_command({0.0, 0.0, *st.turn_omega}, cfg.limits);
        } else if (const auto snap = st.cell.read()) {
            const ReactiveOutput out =
                reactive_tick(robot, *snap, cfg.clf, cfg.limits, cfg.switch_radius);
            if (out.advance_to) st.cell.advance_active(snap->epoch, *out.advance_to);
            cmd = out.command;
        }
        const auto dgram = udp_encode_command(cmd, out_seq++);
        ::sendto(sock, dgram.data(), dgram.size(), 0, reinterpret_cast<sockaddr*>(&peer),
                 sizeof(peer));
    }
    const auto stop = udp_encode_command({}, out_seq++);
    ::sendto(sock, stop.data(), stop.size(), 0, reinterpret_cast<sockaddr*>(&peer), sizeof(peer));
    ::close(sock);
    if (!quiet) {
        std::cout << "bridge: " << (code == kExitSuccess ? "goal reached" : "stopped") << "\n";
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CLF-driven reactive planner"};
    app.require_subcommand(1);

    std::string preset, config_path, out_flag, traj_csv, peer = "127.0.0.1";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    int listen_port = 47800, peer_port = 47801;
    double duration = 60.0;

    auto add_common = [&](CLI::App* sub, bool with_out = true) {
        sub->add_option("--preset", preset, "built-in preset name");
        sub->add_option("--config", config_path, "YAML config path");
        sub->add_option("--seed", seed, "seed override");
        if (with_out) sub->add_option("--out,-o", out_flag, "output directory");
        sub->add_flag("--quiet,-q", quiet, "suppress console output");
    };

    CLI::App* run = app.add_subcommand("run", "execute a scenario end to end");
    add_common(run);
    CLI::App* sweep = app.add_subcommand("sweep", "closed-loop steering families");
    add_common(sweep);
    CLI::App* plot = app.add_subcommand("plot", "render a map/trajectory SVG");
    add_common(plot);
    plot->add_option("--traj", traj_csv, "trajectory.csv to overlay");
    CLI::App* gen = app.add_subcommand("gen-map", "generate and dump scenario maps");
    add_common(gen);
    CLI::App* bridge = app.add_subcommand("bridge", "UDP planner endpoint");
    add_common(bridge, false);
    bridge->add_option("--listen", listen_port, "UDP port for incoming poses");
    bridge->add_option("--peer", peer, "plant host");
    bridge->add_option("--peer-port", peer_port, "plant UDP port");
    bridge->add_option("--duration", duration, "wall-clock run limit, seconds");

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path out_dir = resolve_out_dir(out_flag);
        if (run->parsed()) {
            return cmd_run(resolve_scenario(preset, config_path, seed), out_dir, quiet);
        }
        if (sweep->parsed()) {
            return cmd_sweep(resolve_sweep(preset, config_path), out_dir, quiet);
        }
        if (plot->parsed()) {
            return cmd_plot(resolve_scenario(preset, config_path, seed), traj_csv,
                            out_dir / "plot.svg");
        }
        if (gen->parsed()) {
            return cmd_gen_map(resolve_scenario(preset, config_path, seed), out_dir, quiet);
        }
        if (bridge->parsed()) {
            return cmd_bridge(resolve_scenario(preset, config_path, seed), listen_port, peer,
                              peer_port, duration, quiet);
        }
    } catch (const omniplan::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissionFailure;
    }
    return kExitConfigError;
}
