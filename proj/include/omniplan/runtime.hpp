#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "omniplan/clf.hpp"
#include "omniplan/geometry.hpp"
#include "omniplan/grid_map.hpp"
#include "omniplan/mission.hpp"
#include "omniplan/planner.hpp"
#include "omniplan/robots.hpp"
#include "omniplan/scenario.hpp"

namespace omniplan {

/// Single-writer, multi-reader holder of the published plan. Snapshots are
/// replaced whole; the reactive side advances the active way-pose through an
/// epoch-checked update so a stale tick cannot touch a newer plan.
class SnapshotCell {
  public:
    void publish(PathSnapshot snap) {
        auto next = std::make_shared<const PathSnapshot>(std::move(snap));
        std::lock_guard<std::mutex> lock(mu_);
        snap_ = std::move(next);
    }

    void clear() {
        std::lock_guard<std::mutex> lock(mu_);
        snap_.reset();
    }

    std::shared_ptr<const PathSnapshot> read() const {
        std::lock_guard<std::mutex> lock(mu_);
        return snap_;
    }

    bool advance_active(std::uint64_t epoch, std::size_t new_index) {
        std::lock_guard<std::mutex> lock(mu_);
        if (!snap_ || snap_->epoch != epoch) return false;
        if (new_index <= snap_->active_index || new_index >= snap_->wayposes.size()) return false;
        PathSnapshot next = *snap_;
        next.active_index = new_index;
        snap_ = std::make_shared<const PathSnapshot>(std::move(next));
        return true;
    }

  private:
    mutable std::mutex mu_;
    std::shared_ptr<const PathSnapshot> snap_;
};

struct ReactiveOutput {
    Command command;
    std::optional<std::size_t> advance_to;  // way-pose index to record back
    bool awaiting_plan = false;
};

/// Memoryless vector-field evaluation: steer toward the active way-pose,
/// advancing past way-poses within the switch radius.
inline ReactiveOutput reactive_tick(const Pose& pose, const PathSnapshot& snap,
                                    const ClfParams& clf, const CommandLimits& limits,
                                    double switch_radius) {
    ReactiveOutput out;
    if (snap.empty()) {
        out.awaiting_plan = true;
        return out;
    }
    std::size_t idx = std::min(snap.active_index, snap.wayposes.size() - 1);
    while (idx + 1 < snap.wayposes.size() &&
           distance_xy(pose, GoalPosition{snap.wayposes[idx].x, snap.wayposes[idx].y}) <
               switch_radius) {
        ++idx;
    }
    if (idx != snap.active_index) out.advance_to = idx;
    const Pose& target = snap.wayposes[idx];
    out.command =
        clamp_command(clf_commands(to_egopolar(pose, {target.x, target.y}), clf), limits);
    return out;
}

// ---------------------------------------------------------------------------
// Planning loop

struct PlannerLoopState {
    MissionState mission;
    SnapshotCell cell;
    std::uint64_t epoch = 0;
    std::optional<double> turn_omega;  // set while the FSM turns in place
    bool goal_reached = false;
    bool mission_failed = false;
    std::size_t replan_count = 0;
    std::size_t fresh_plan_count = 0;
    bool fsm_changed_last_tick = false;
};

namespace detail {

inline std::string fsm_kind_name(MissionStateKind k) {
    switch (k) {
        case MissionStateKind::TurnInPlace: return "turn_in_place";
        case MissionStateKind::Navigate: return "navigate";
        case MissionStateKind::IntersectionAction: return "intersection";
        case MissionStateKind::GoalReached: return "goal_reached";
    }
    return "?";
}

}  // namespace detail

/// One planning-rate update: build the local planning map, step the mission
/// FSM, warm start from the previous snapshot, grow the tree, publish.
inline void planning_tick(PlannerLoopState& st, const Pose& robot,
                          const LayeredGridMap& perceived_global, double z_r,
                          const ScenarioConfig& cfg, Rng& rng, double sim_time,
                          std::vector<std::string>* events) {
    auto log = [&](const std::string& line) {
        if (events) events->push_back(line);
    };
    std::ostringstream ev;
    ev.precision(12);

    // Inflate the mapped obstacles (walls, furniture) before the step-height
    // pass so elevation-derived cells keep cell precision, then free any
    // margin-only cells under the robot itself: grazing the margin must not
    // leave the plan with an untraversable root.
    LayeredGridMap local = crop_local(perceived_global, robot, cfg.local_map_side);
    const LayeredGridMap raw = apply_step_height_obstacles(local, z_r, cfg.step_height);
    local = apply_step_height_obstacles(inflate_obstacles(local, cfg.inflation_radius), z_r,
                                        cfg.step_height);
    if (cfg.use_masking) {
        local = mask_beyond_walls(local, robot).map;
    }
    if (cfg.inflation_radius > 0.0 && local.has_layer("obstacle")) {
        const int rr = static_cast<int>(std::ceil(cfg.inflation_radius / local.resolution()));
        const CellIndex rc = local.world_to_cell(robot.x, robot.y);
        for (int dy = -rr; dy <= rr; ++dy) {
            for (int dx = -rr; dx <= rr; ++dx) {
                const CellIndex c{rc.ix + dx, rc.iy + dy};
                if (!local.in_bounds(c)) continue;
                if (std::hypot(local.cell_x(c.ix) - robot.x, local.cell_y(c.iy) - robot.y) >
                    cfg.inflation_radius) {
                    continue;
                }
                if (local.at("obstacle", c) != 0.0 && raw.at("obstacle", c) == 0.0) {
                    local.set("obstacle", c, 0.0);
                }
            }
        }
    }
    local = slope_layer(local);

    PlanContext ctx;
    ctx.map = &local;
    ctx.z_r = z_r;
    ctx.clf = cfg.clf;
    ctx.params = cfg.planner;

    const MissionStateKind prev_kind = st.mission.kind;
    const FsmOutput fsm = fsm_step(st.mission, robot, local, cfg.mission, ctx,
                                   cfg.limits.omega_max, 1.0 / cfg.rates.planning_hz);
    const bool kind_changed = fsm.state.kind != prev_kind;
    st.fsm_changed_last_tick = kind_changed;
    st.mission = fsm.state;

    if (kind_changed) {
        ev.str("");
        ev << "{\"t\":" << sim_time << ",\"event\":\"fsm\",\"state\":\""
           << detail::fsm_kind_name(fsm.state.kind) << "\"}";
        log(ev.str());
        if (fsm.state.kind == MissionStateKind::IntersectionAction) {
            ev.str("");
            ev << "{\"t\":" << sim_time << ",\"event\":\"branch\",\"bearing\":"
               << fsm.state.branch_bearing << ",\"junction_x\":" << fsm.state.junction_center.x
               << ",\"junction_y\":" << fsm.state.junction_center.y << "}";
            log(ev.str());
        }
    }

    if (fsm.mission_failed) {
        st.mission_failed = true;
        return;
    }
    if (fsm.state.kind == MissionStateKind::GoalReached) {
        st.goal_reached = true;
        return;
    }
    if (fsm.turn_omega) {
        st.turn_omega = fsm.turn_omega;
        st.cell.clear();
        return;
    }
    st.turn_omega.reset();
    if (!fsm.target) return;

    const GoalPosition goal{fsm.target->x, fsm.target->y};
    if (!local.traversable_xy(robot.x, robot.y)) {
        ev.str("");
        ev << "{\"t\":" << sim_time << ",\"event\":\"plan_failed\",\"reason\":\"root\"}";
        log(ev.str());
        return;
    }

    const auto prev = st.cell.read();
    Tree tree = (prev && !kind_changed) ? warm_start(*prev, robot, ctx, cfg.switch_radius)
                                        : Tree(robot);
    const bool seeded = tree.size() > 1;
    PlanContext grow_ctx = ctx;
    if (seeded) grow_ctx.params.pinned_node = 1;
    const std::size_t iters =
        seeded ? std::max<std::size_t>(1, cfg.planner.max_iterations / 2)
               : cfg.planner.max_iterations;
    grow_tree(tree, goal, grow_ctx, rng, iters);

    if (tree.size() <= 1) {
        ev.str("");
        ev << "{\"t\":" << sim_time << ",\"event\":\"plan_failed\",\"reason\":\"empty\"}";
        log(ev.str());
        return;  // previous snapshot retained
    }
    st.epoch += 1;
    PathSnapshot snap =
        snapshot_from_tree(tree, goal, grow_ctx, st.epoch, seeded ? 1 : -1);
    st.cell.publish(std::move(snap));
    st.replan_count += 1;
    if (!seeded) st.fresh_plan_count += 1;
    ev.str("");
    ev << "{\"t\":" << sim_time << ",\"event\":\"replan\",\"epoch\":" << st.epoch
       << ",\"warm\":" << (seeded ? "true" : "false") << ",\"nodes\":" << tree.size() << "}";
    log(ev.str());
}

// ---------------------------------------------------------------------------
// Metrics helpers

namespace detail {

/// 1D squared-distance transform (lower envelope of parabolas).
inline void edt_1d(std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            const int p = v[static_cast<std::size_t>(k)];
            s = ((f[static_cast<std::size_t>(q)] + q * q) -
                 (f[static_cast<std::size_t>(p)] + p * p)) /
                (2.0 * q - 2.0 * p);
            if (s <= z[static_cast<std::size_t>(k)]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
        const int p = v[static_cast<std::size_t>(k)];
        d[static_cast<std::size_t>(q)] =
            (q - p) * (q - p) + f[static_cast<std::size_t>(p)];
    }
    for (int q = 0; q < n; ++q) f[static_cast<std::size_t>(q)] = d[static_cast<std::size_t>(q)];
}

/// Exact Euclidean distance (in meters) from every cell to the nearest
/// obstacle cell; empty result when the map has no obstacle cells.
inline std::vector<double> obstacle_distance_field(const LayeredGridMap& map) {
    if (!map.has_layer("obstacle")) return {};
    const auto& obs = map.layer("obstacle");
    bool any = false;
    const double inf = 1e12;
    std::vector<double> field(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        field[i] = obs[i] != 0.0 ? 0.0 : inf;
        any = any || obs[i] != 0.0;
    }
    if (!any) return {};
    const int w = map.width();
    const int h = map.height();
    std::vector<double> col(static_cast<std::size_t>(h));
    for (int ix = 0; ix < w; ++ix) {
        for (int iy = 0; iy < h; ++iy) col[static_cast<std::size_t>(iy)] = field[map.index({ix, iy})];
        edt_1d(col);
        for (int iy = 0; iy < h; ++iy) field[map.index({ix, iy})] = col[static_cast<std::size_t>(iy)];
    }
    std::vector<double> row(static_cast<std::size_t>(w));
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) row[static_cast<std::size_t>(ix)] = field[map.index({ix, iy})];
        edt_1d(row);
        for (int ix = 0; ix < w; ++ix) field[map.index({ix, iy})] = row[static_cast<std::size_t>(ix)];
    }
    for (double& v : field) v = std::sqrt(v) * map.resolution();
    return field;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Full simulated run

enum class RunStatus { GoalReached, MissionFailed, Collision, Timeout };

struct TrajectoryRow {
    double t = 0.0;
    double x = 0.0, y = 0.0, theta = 0.0;
    double v_x = 0.0, v_y = 0.0, omega = 0.0;
    int step_index = 0;
};

struct DiscontinuityEvent {
    double t = 0.0;
    double magnitude = 0.0;
};

struct RunReport {
    std::string name;
    RunStatus status = RunStatus::Timeout;
    double sim_time = 0.0;
    double path_length = 0.0;
    double min_clearance = -1.0;  // -1 when the map has no obstacle cells
    std::size_t replan_count = 0;
    std::size_t fresh_plan_count = 0;
    std::vector<DiscontinuityEvent> discontinuities;
    std::size_t disturbances_applied = 0;
    Pose final_pose;
    double goal_distance = 0.0;
    std::uint64_t seed = 0;

    std::string to_json() const {
        std::ostringstream out;
        out.precision(17);
        const char* status_str = status == RunStatus::GoalReached     ? "goal_reached"
                                 : status == RunStatus::MissionFailed ? "mission_failed"
                                 : status == RunStatus::Collision     ? "collision"
                                                                      : "timeout";
        out << "{\"name\":\"" << name << "\",\"status\":\"" << status_str << "\""
            << ",\"seed\":" << seed << ",\"sim_time\":" << sim_time
            << ",\"path_length\":" << path_length << ",\"min_clearance\":" << min_clearance
            << ",\"replan_count\":" << replan_count
            << ",\"fresh_plan_count\":" << fresh_plan_count
            << ",\"disturbances_applied\":" << disturbances_applied
            << ",\"final_pose\":{\"x\":" << final_pose.x << ",\"y\":" << final_pose.y
            << ",\"theta\":" << final_pose.theta << "}"
            << ",\"goal_distance\":" << goal_distance << ",\"discontinuities\":[";
        for (std::size_t i = 0; i < discontinuities.size(); ++i) {
            if (i) out << ",";
            out << "{\"t\":" << discontinuities[i].t
                << ",\"magnitude\":" << discontinuities[i].magnitude << "}";
        }
        out << "]}";
        return out.str();
    }
};

struct RunResult {
    RunReport report;
    std::vector<TrajectoryRow> trajectory;
    std::vector<std::string> events;  // JSON lines

    int exit_code() const {
        switch (report.status) {
            case RunStatus::GoalReached: return 0;
            case RunStatus::MissionFailed: return 2;
            case RunStatus::Timeout: return 2;
            case RunStatus::Collision: return 4;
        }
        return 2;
    }
};

inline std::string trajectory_to_csv(const std::vector<TrajectoryRow>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "sim_time,x,y,theta,v_x,v_y,omega,step_index\n";
    for (const TrajectoryRow& r : rows) {
        out << r.t << "," << r.x << "," << r.y << "," << r.theta << "," << r.v_x << "," << r.v_y
            << "," << r.omega << "," << r.step_index << "\n";
    }
    return out.str();
}

namespace detail {

/// Within-step ALIP integrator: latches the newest command at step initiation,
/// places feet for deadbeat average-velocity tracking, exposes the CoM pose at
/// sim resolution.
class AlipPlant {
  public:
    AlipPlant(const Pose& start, const AlipParams& prm, std::uint64_t seed)
        : prm_(prm), rng_(seed) {
        state_.x = {start.x, 0.0, start.x};
        state_.y = {start.y, 0.0, start.y};
        state_.theta = start.theta;
        begin_x_ = state_.x;
        begin_y_ = state_.y;
        theta0_ = start.theta;
        elapsed_ = tau_actual_ = 0.0;  // forces a step initiation on first advance
    }

    int step_index() const { return step_index_; }

    Pose pose() const {
        return {alip_com_at(begin_x_, prm_, elapsed_), alip_com_at(begin_y_, prm_, elapsed_),
                wrap_angle(theta0_ + cmd_.omega * elapsed_)};
    }

    void advance(double dt, const Command& mailbox) {
        if (elapsed_ >= tau_actual_) {
            if (step_index_ > 0 || started_) complete_step();
            initiate_step(mailbox);
        }
        elapsed_ = std::min(elapsed_ + dt, tau_actual_);
    }

  private:
    void initiate_step(const Command& mailbox) {
        cmd_ = mailbox;
        const double ct = std::cos(state_.theta);
        const double st = std::sin(state_.theta);
        const double vwx = cmd_.v_x * ct - cmd_.v_y * st;
        const double vwy = cmd_.v_x * st + cmd_.v_y * ct;
        tau_actual_ = prm_.tau;
        if (prm_.tau_jitter > 0.0) {
            tau_actual_ *= 1.0 + prm_.tau_jitter * rng_.uniform(-1.0, 1.0);
        }
        state_.x.p = alip_foot_placement(state_.x, prm_, vwx, tau_actual_);
        state_.y.p = alip_foot_placement(state_.y, prm_, vwy, tau_actual_);
        if (prm_.sway_amplitude > 0.0) {
            const double side = step_index_ % 2 == 0 ? 1.0 : -1.0;
            state_.y.p += side * prm_.sway_amplitude;
        }
        begin_x_ = state_.x;
        begin_y_ = state_.y;
        theta0_ = state_.theta;
        elapsed_ = 0.0;
        step_index_ += 1;
        started_ = true;
    }

    void complete_step() {
        state_.x = alip_step(begin_x_, prm_, tau_actual_);
        state_.y = alip_step(begin_y_, prm_, tau_actual_);
        state_.theta = wrap_angle(theta0_ + cmd_.omega * tau_actual_);
    }

    AlipParams prm_;
    Rng rng_;
    AlipState state_;
    AlipAxisState begin_x_, begin_y_;
    double theta0_ = 0.0;
    Command cmd_;
    double tau_actual_ = 0.0;
    double elapsed_ = 0.0;
    int step_index_ = 0;
    bool started_ = false;
};

}  // namespace detail

/// Deterministic simulated-clock run of the full stack.
inline RunResult run_scenario(const ScenarioConfig& cfg) {
    const Scene scene = make_scene(cfg);
    validate_scenario(cfg, scene);
    const LayeredGridMap& truth = scene.truth;
    const LayeredGridMap& perceived = scene.perceived;
    const auto clearance_field = detail::obstacle_distance_field(truth);

    RunResult result;
    RunReport& rep = result.report;
    rep.name = cfg.name;
    rep.seed = cfg.seed;
    rep.min_clearance = clearance_field.empty() ? -1.0 : std::numeric_limits<double>::infinity();

    const double dt = cfg.rates.sim_dt;
    const auto total_ticks = static_cast<long>(std::lround(cfg.timeout / dt));
    const auto reactive_every =
        std::max(1L, static_cast<long>(std::lround(1.0 / (cfg.rates.reactive_hz * dt))));
    const auto planning_every =
        std::max(1L, static_cast<long>(std::lround(1.0 / (cfg.rates.planning_hz * dt))));

    Pose robot = cfg.start;
    std::optional<detail::AlipPlant> alip;
    if (cfg.robot == RobotModel::Alip) {
        alip.emplace(cfg.start, cfg.alip, cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    }

    PlannerLoopState planner_state;
    Rng planner_rng(cfg.seed);
    Command current_cmd;
    Command prev_reactive_cmd;
    bool have_prev_reactive = false;
    bool exempt_next_reactive = true;

    std::vector<Disturbance> pending = cfg.disturbances;
    std::sort(pending.begin(), pending.end(),
              [](const Disturbance& a, const Disturbance& b) { return a.time < b.time; });
    std::size_t next_disturbance = 0;

    std::ostringstream ev;
    ev.precision(12);
    double prev_elev = truth.elevation_at(robot.x, robot.y);
    rep.status = RunStatus::Timeout;

    for (long k = 0; k < total_ticks; ++k) {
        const double t = static_cast<double>(k) * dt;
        bool disturbed_this_tick = false;

        while (next_disturbance < pending.size() && pending[next_disturbance].time <= t) {
            const Disturbance& d = pending[next_disturbance];
            robot = inject_disturbance(robot, {d.dx, d.dy, d.dtheta});
            if (alip) alip.emplace(robot, cfg.alip, cfg.seed ^ 0x9E3779B97F4A7C15ULL);
            rep.disturbances_applied += 1;
            disturbed_this_tick = true;
            exempt_next_reactive = true;
            prev_elev = truth.elevation_at(robot.x, robot.y);
            ev.str("");
            ev << "{\"t\":" << t << ",\"event\":\"disturbance\",\"dx\":" << d.dx
               << ",\"dy\":" << d.dy << ",\"dtheta\":" << d.dtheta << "}";
            result.events.push_back(ev.str());
            next_disturbance += 1;
        }

        if (k % planning_every == 0) {
            const double z_r = truth.elevation_at(robot.x, robot.y);
            planning_tick(planner_state, robot, perceived, z_r, cfg, planner_rng, t,
                          &result.events);
            if (planner_state.fsm_changed_last_tick) exempt_next_reactive = true;
            if (planner_state.mission_failed) {
                rep.status = RunStatus::MissionFailed;
                break;
            }
            if (planner_state.goal_reached) {
                rep.status = RunStatus::GoalReached;
                break;
            }
        }

        if (k % reactive_every == 0) {
            Command cmd;
            if (planner_state.turn_omega) {
                cmd = clamp_command({0.0, 0.0, *planner_state.turn_omega}, cfg.limits);
            } else if (const auto snap = planner_state.cell.read()) {
                const ReactiveOutput out =
                    reactive_tick(robot, *snap, cfg.clf, cfg.limits, cfg.switch_radius);
                if (out.advance_to) {
                    planner_state.cell.advance_active(snap->epoch, *out.advance_to);
                }
                cmd = out.command;
            }
            if (have_prev_reactive && !exempt_next_reactive) {
                const double jump = std::sqrt(
                    (cmd.v_x - prev_reactive_cmd.v_x) * (cmd.v_x - prev_reactive_cmd.v_x) +
                    (cmd.v_y - prev_reactive_cmd.v_y) * (cmd.v_y - prev_reactive_cmd.v_y) +
                    (cmd.omega - prev_reactive_cmd.omega) * (cmd.omega - prev_reactive_cmd.omega));
                if (jump > cfg.discontinuity_threshold) {
                    rep.discontinuities.push_back({t, jump});
                }
            }
            prev_reactive_cmd = cmd;
            have_prev_reactive = true;
            exempt_next_reactive = false;
            current_cmd = cmd;
        }

        result.trajectory.push_back({t, robot.x, robot.y, robot.theta, current_cmd.v_x,
                                     current_cmd.v_y, current_cmd.omega,
                                     alip ? alip->step_index() : 0});

        const Pose before = robot;
        if (alip) {
            alip->advance(dt, current_cmd);
            robot = alip->pose();
        } else {
            robot = omni_integrate(robot, current_cmd, dt);
        }
        rep.path_length += std::hypot(robot.x - before.x, robot.y - before.y);

        const CellIndex cell = truth.world_to_cell(robot.x, robot.y);
        if (!truth.in_bounds(cell) ||
            (truth.has_layer("obstacle") && truth.at("obstacle", cell) != 0.0)) {
            rep.status = RunStatus::Collision;
            rep.sim_time = t + dt;
            break;
        }
        const double elev = truth.elevation_at(robot.x, robot.y);
        if (!disturbed_this_tick && std::abs(elev - prev_elev) > cfg.step_height) {
            rep.status = RunStatus::Collision;  // stepped off a ledge or into a wall
            rep.sim_time = t + dt;
            break;
        }
        prev_elev = elev;
        if (!clearance_field.empty()) {
            rep.min_clearance = std::min(rep.min_clearance, clearance_field[truth.index(cell)]);
        }
        rep.sim_time = t + dt;

        if (distance_xy(robot, cfg.mission.final_goal) < cfg.mission.goal_tolerance) {
            rep.status = RunStatus::GoalReached;
            break;
        }
    }

    rep.replan_count = planner_state.replan_count;
    rep.fresh_plan_count = planner_state.fresh_plan_count;
    rep.final_pose = robot;
    rep.goal_distance = distance_xy(robot, cfg.mission.final_goal);
    return result;
}

}  // namespace omniplan
