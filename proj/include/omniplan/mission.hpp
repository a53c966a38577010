#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "omniplan/clf.hpp"
#include "omniplan/geometry.hpp"
#include "omniplan/grid_map.hpp"
#include "omniplan/planner.hpp"

namespace omniplan {

enum class MissionStateKind { TurnInPlace, Navigate, IntersectionAction, GoalReached };

enum class IntersectionPolicy { Left, Right, Straight };

struct MissionConfig {
    GoalPosition final_goal;
    double arc_radius = 3.0;
    int arc_samples = 21;
    IntersectionPolicy intersection_policy = IntersectionPolicy::Left;
    double ring_inner = 2.0;
    double ring_outer = 3.0;
    double cluster_linkage_threshold = 0.3;  // default 3x a 0.1 m map resolution
    double goal_tolerance = 0.3;
    double rear_exclusion = 2.6;  // |bearing| above this is "the way we came"
};

/// FSM value state. IntersectionAction latches its chosen branch target until
/// the robot clears the junction.
struct MissionState {
    MissionStateKind kind = MissionStateKind::Navigate;
    Pose target;                       // current navigation / branch target
    double branch_bearing = 0.0;       // chosen branch, IntersectionAction only
    GoalPosition junction_center;      // where the intersection was handled
    bool has_junction = false;         // junction_center valid (suppression)
    double sweep_accumulated = 0.0;    // radians turned while blocked
    double turn_sign = 0.0;            // latched rotation direction, 0 when free
};

struct FsmOutput {
    MissionState state;
    std::optional<Pose> target;        // navigation target, when not turning
    std::optional<double> turn_omega;  // pure-rotation command, TurnInPlace only
    bool mission_failed = false;
};

/// Candidate sub-goals on an arc of `arc_radius` spanning the FoV; the winner
/// minimizes cost-to-come (steered edge cost) + CLF cost-to-goal. nullopt when
/// every candidate is untraversable or unreachable.
inline std::optional<Pose> find_subgoal(const LayeredGridMap& map, const Pose& robot,
                                        const MissionConfig& cfg, const PlanContext& ctx) {
    if (distance_xy(robot, cfg.final_goal) <= cfg.arc_radius) {
        const Pose goal_pose{cfg.final_goal.x, cfg.final_goal.y,
                             wrap_angle(std::atan2(cfg.final_goal.y - robot.y,
                                                   cfg.final_goal.x - robot.x))};
        if (map.traversable_xy(goal_pose.x, goal_pose.y)) {
            // Only take the goal directly when it is actually reachable;
            // otherwise fall through to the arc candidates.
            const auto path = ctx.steer(robot, goal_pose.x, goal_pose.y);
            if (path && ctx.collision_free(*path) &&
                ctx.edge_cost(robot, goal_pose, *path)) {
                return goal_pose;
            }
        }
    }
    const double fov = fov_half_angle(ctx.clf);
    std::optional<Pose> best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.arc_samples; ++k) {
        const double bearing =
            cfg.arc_samples > 1 ? -fov + 2.0 * fov * k / (cfg.arc_samples - 1) : 0.0;
        const double ang = robot.theta + bearing;
        const double cx = robot.x + cfg.arc_radius * std::cos(ang);
        const double cy = robot.y + cfg.arc_radius * std::sin(ang);
        if (!map.traversable_xy(cx, cy)) continue;
        const Pose candidate{cx, cy,
                             wrap_angle(std::atan2(cfg.final_goal.y - cy, cfg.final_goal.x - cx))};
        const auto path = ctx.steer(robot, cx, cy);
        if (!path || !ctx.collision_free(*path)) continue;
        const auto come = ctx.edge_cost(robot, candidate, *path);
        if (!come) continue;
        const double to_goal =
            clf_value(to_egopolar(candidate, cfg.final_goal), ctx.clf);
        const double cost = *come + to_goal;
        if (cost < best_cost) {
            best_cost = cost;
            best = candidate;
        }
    }
    return best;
}

/// One walkable opening around the robot: centroid of an annulus cluster plus
/// its bearing relative to the robot heading.
struct Branch {
    double bearing = 0.0;
    GoalPosition centroid;
};

/// Traversable cells in the annulus [ring_inner, ring_outer] around the robot,
/// grouped by single-linkage clustering (Euclidean over cell centers). Returns
/// one branch per cluster, sorted by bearing.
inline std::vector<Branch> detect_branches(const LayeredGridMap& map, const Pose& robot,
                                           const MissionConfig& cfg) {
    struct RingCell {
        double x, y;
    };
    std::vector<RingCell> cells;
    const double res = map.resolution();
    const int span = static_cast<int>(std::ceil(cfg.ring_outer / res)) + 1;
    const CellIndex rc = map.world_to_cell(robot.x, robot.y);
    for (int iy = rc.iy - span; iy <= rc.iy + span; ++iy) {
        for (int ix = rc.ix - span; ix <= rc.ix + span; ++ix) {
            const CellIndex c{ix, iy};
            if (!map.in_bounds(c) || !map.traversable(c)) continue;
            const double x = map.cell_x(ix);
            const double y = map.cell_y(iy);
            const double d = std::hypot(x - robot.x, y - robot.y);
            if (d >= cfg.ring_inner && d <= cfg.ring_outer) cells.push_back({x, y});
        }
    }
    if (cells.empty()) return {};

    // Single-linkage with a fixed cut threshold is connected components of the
    // "within threshold" graph; bucketed by a threshold-sized grid.
    const double thr = cfg.cluster_linkage_threshold;
    std::vector<int> parent(cells.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };

    std::unordered_map<std::int64_t, std::vector<int>> buckets;
    auto key = [&](double x, double y) {
        const auto bx = static_cast<std::int64_t>(std::floor(x / thr));
        const auto by = static_cast<std::int64_t>(std::floor(y / thr));
        return bx * 73856093 ^ by * 19349663;
    };
    for (std::size_t i = 0; i < cells.size(); ++i) {
        buckets[key(cells[i].x, cells[i].y)].push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                const auto it = buckets.find(key(cells[i].x + dx * thr, cells[i].y + dy * thr));
                if (it == buckets.end()) continue;
                for (int j : it->second) {
                    if (j <= static_cast<int>(i)) continue;
                    const double d = std::hypot(cells[i].x - cells[static_cast<std::size_t>(j)].x,
                                                cells[i].y - cells[static_cast<std::size_t>(j)].y);
                    if (d <= thr) unite(static_cast<int>(i), j);
                }
            }
        }
    }

    std::unordered_map<int, std::pair<double, double>> sums;
    std::unordered_map<int, int> counts;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const int r = find(static_cast<int>(i));
        sums[r].first += cells[i].x;
        sums[r].second += cells[i].y;
        counts[r] += 1;
    }
    std::vector<Branch> branches;
    for (const auto& [root, sum] : sums) {
        const double cx = sum.first / counts[root];
        const double cy = sum.second / counts[root];
        branches.push_back(
            {wrap_angle(std::atan2(cy - robot.y, cx - robot.x) - robot.theta), {cx, cy}});
    }
    std::sort(branches.begin(), branches.end(),
              [](const Branch& a, const Branch& b) { return a.bearing < b.bearing; });
    return branches;
}

/// Bearing-only view of detect_branches.
inline std::vector<double> detect_intersection(const LayeredGridMap& map, const Pose& robot,
                                               const MissionConfig& cfg) {
    std::vector<double> bearings;
    for (const Branch& b : detect_branches(map, robot, cfg)) bearings.push_back(b.bearing);
    return bearings;
}

namespace detail {

inline std::optional<Branch> pick_branch(const std::vector<Branch>& branches,
                                         const MissionConfig& cfg) {
    std::vector<Branch> usable;
    for (const Branch& b : branches) {
        if (std::abs(b.bearing) <= cfg.rear_exclusion) usable.push_back(b);
    }
    if (usable.empty()) return std::nullopt;
    switch (cfg.intersection_policy) {
        case IntersectionPolicy::Left:
            return *std::max_element(usable.begin(), usable.end(),
                                     [](const Branch& a, const Branch& b) {
                                         return a.bearing < b.bearing;
                                     });
        case IntersectionPolicy::Right:
            return *std::min_element(usable.begin(), usable.end(),
                                     [](const Branch& a, const Branch& b) {
                                         return a.bearing < b.bearing;
                                     });
        case IntersectionPolicy::Straight: {
            Branch best = usable.front();
            for (const Branch& b : usable) {
                if (std::abs(b.bearing) < std::abs(best.bearing)) best = b;
            }
            return best;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// One FSM decision. The returned target (when navigating) is always inside
/// the FoV; otherwise the machine commands a turn in place.
inline FsmOutput fsm_step(const MissionState& state, const Pose& robot, const LayeredGridMap& map,
                          const MissionConfig& cfg, const PlanContext& ctx,
                          double turn_rate = 0.6, double tick_period = 0.2) {
    FsmOutput out;
    out.state = state;

    if (state.kind == MissionStateKind::GoalReached) {
        out.state.kind = MissionStateKind::GoalReached;
        return out;
    }
    if (distance_xy(robot, cfg.final_goal) < cfg.goal_tolerance) {
        out.state.kind = MissionStateKind::GoalReached;
        return out;
    }

    auto emit_target = [&](const Pose& target, MissionStateKind kind) {
        const EgoPolarState s = to_egopolar(robot, {target.x, target.y});
        out.state.kind = kind;
        out.state.target = target;
        out.state.sweep_accumulated = 0.0;
        if (!in_fov(s.delta, ctx.clf)) {
            out.state.kind = MissionStateKind::TurnInPlace;
            // Keep rotating the same way once turning has started; re-deciding
            // the direction every tick chatters when the target sits near the
            // rear, where the bearing sign flips with tiny heading changes.
            const double sign =
                state.turn_sign != 0.0 ? state.turn_sign : (s.delta > 0.0 ? 1.0 : -1.0);
            out.turn_omega = sign * turn_rate;
            out.state.turn_sign = sign;
        } else {
            out.target = target;
            out.state.turn_sign = 0.0;
        }
    };

    // A latched intersection action persists until the junction is cleared.
    if (state.kind == MissionStateKind::IntersectionAction && state.has_junction) {
        const double from_junction =
            std::hypot(robot.x - state.junction_center.x, robot.y - state.junction_center.y);
        const double to_target = distance_xy(robot, GoalPosition{state.target.x, state.target.y});
        if (from_junction <= cfg.ring_outer && to_target > cfg.goal_tolerance) {
            emit_target(state.target, MissionStateKind::IntersectionAction);
            out.state.junction_center = state.junction_center;
            out.state.has_junction = true;
            out.state.branch_bearing = state.branch_bearing;
            return out;
        }
    }

    // Intersection detection, suppressed near the last handled junction.
    const bool suppressed =
        state.has_junction &&
        std::hypot(robot.x - state.junction_center.x, robot.y - state.junction_center.y) <=
            2.0 * cfg.ring_outer;
    if (!suppressed) {
        const auto branches = detect_branches(map, robot, cfg);
        if (branches.size() >= 3) {
            if (const auto branch = detail::pick_branch(branches, cfg)) {
                // The cluster centroid sits mid-corridor by construction, so
                // it is a safe latched target; a point extrapolated along the
                // bearing could land inside a wall margin.
                const GoalPosition c = branch->centroid;
                const Pose target{c.x, c.y,
                                  wrap_angle(std::atan2(c.y - robot.y, c.x - robot.x))};
                emit_target(target, MissionStateKind::IntersectionAction);
                out.state.branch_bearing = branch->bearing;
                out.state.junction_center = {robot.x, robot.y};
                out.state.has_junction = true;
                return out;
            }
        }
    }

    const auto subgoal = find_subgoal(map, robot, cfg, ctx);
    if (subgoal) {
        const bool keep_junction = out.state.has_junction;
        emit_target(*subgoal, MissionStateKind::Navigate);
        out.state.has_junction = keep_junction;
        return out;
    }

    // Blocked: sweep in place looking for an opening, continuing any turn
    // already in progress.
    out.state.kind = MissionStateKind::TurnInPlace;
    out.state.sweep_accumulated = state.sweep_accumulated + turn_rate * tick_period;
    out.state.turn_sign = state.turn_sign != 0.0 ? state.turn_sign : 1.0;
    out.turn_omega = out.state.turn_sign * turn_rate;
    if (out.state.sweep_accumulated > 2.0 * M_PI) {
        out.mission_failed = true;
    }
    return out;
}

}  // namespace omniplan
