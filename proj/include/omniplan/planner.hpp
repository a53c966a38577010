#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "omniplan/clf.hpp"
#include "omniplan/geometry.hpp"
#include "omniplan/grid_map.hpp"
#include "omniplan/rng.hpp"

namespace omniplan {

struct PlannerParams {
    double eta = 10.0;    // near-radius constant in L(m)
    int xi = 3;           // dimension of the configuration space
    double kappa = 2.0;   // meters, extension length cap
    double t_k = 5.0;     // traversability gate for near sets
    double k_t = 1.0;     // traversability weight in the edge cost
    double goal_bias = 0.1;
    double gaussian_sampling_sigma = 0.0;  // 0 disables corridor sampling
    double k_delta = 0.0;                  // FoV penalty gain in the distance
    bool use_fov_penalty = false;
    double r_stop = 0.3;  // meters, steering convergence / goal region radius
    std::size_t max_iterations = 2000;
    std::size_t max_near = 12;  // cap on near-set size, closest-by-distance first
    double steer_dt_max = 0.5;
    std::size_t steer_max_steps = 4000;
    int pinned_node = -1;  // node exempt from rewiring (warm-started first way-pose)
};

/// Asymmetric node-to-node distance: the CLF value of the target position seen
/// from the source pose, plus an optional out-of-FoV penalty.
inline double clf_distance(const Pose& from, double to_x, double to_y, const ClfParams& clf,
                           const PlannerParams& p) {
    const EgoPolarState s = to_egopolar(from, {to_x, to_y});
    double d = clf_value(s, clf);
    if (p.use_fov_penalty) {
        d += p.k_delta * std::max(std::abs(s.delta) - fov_half_angle(clf), 0.0);
    }
    return d;
}

inline double clf_distance(const Pose& from, const Pose& to, const ClfParams& clf,
                           const PlannerParams& p) {
    return clf_distance(from, to.x, to.y, clf, p);
}

struct SteerPath {
    std::vector<Pose> poses;  // from start to end, spaced at most ~ds apart
    double arc_length = 0.0;
    bool reached = false;  // ended within r_stop of the target position
};

/// Integrate the CLF closed loop from `from` toward a target position with
/// arc-length-controlled steps (dt = ds / speed, capped). Stops when within
/// r_stop of the target, when the arc-length cap is hit, or when the step
/// budget runs out.
inline SteerPath steer_clf_path(const Pose& from, double to_x, double to_y, const ClfParams& clf,
                                double r_stop, double ds, double length_cap, double dt_max,
                                std::size_t max_steps) {
    const GoalPosition goal{to_x, to_y};
    auto cmd_at = [&](const Pose& q) { return clf_commands(to_egopolar(q, goal), clf); };

    SteerPath path;
    Pose pose = from;
    path.poses.push_back(pose);
    for (std::size_t k = 0; k < max_steps; ++k) {
        if (to_egopolar(pose, goal).r < r_stop) {
            path.reached = true;
            return path;
        }
        const Command c = cmd_at(pose);
        const double speed = std::hypot(c.v_x, c.v_y);
        const double dt = speed > 1e-9 ? std::min(dt_max, ds / speed) : dt_max;
        const Pose next = detail::rk4_pose_step(pose, dt, cmd_at);
        path.arc_length += std::hypot(next.x - pose.x, next.y - pose.y);
        pose = next;
        path.poses.push_back(pose);
        if (path.arc_length >= length_cap) {
            path.reached = to_egopolar(pose, goal).r < r_stop;
            return path;
        }
    }
    path.reached = to_egopolar(pose, goal).r < r_stop;
    return path;
}

inline std::vector<PathPoint> path_points(const SteerPath& p) {
    std::vector<PathPoint> pts;
    pts.reserve(p.poses.size());
    for (const Pose& q : p.poses) pts.push_back({q.x, q.y});
    return pts;
}

/// Everything a planning query needs besides the tree itself.
struct PlanContext {
    const LayeredGridMap* map = nullptr;
    double z_r = 0.0;
    ClfParams clf;
    TraversabilityWeights weights;
    PlannerParams params;

    double steer_ds() const { return map ? map->resolution() : 0.1; }

    /// Full steering path from a pose to a position; nullopt on non-convergence.
    std::optional<SteerPath> steer(const Pose& from, double to_x, double to_y) const {
        SteerPath p = steer_clf_path(from, to_x, to_y, clf, params.r_stop, steer_ds(),
                                     std::numeric_limits<double>::infinity(), params.steer_dt_max,
                                     params.steer_max_steps);
        if (!p.reached) return std::nullopt;
        return p;
    }

    /// Extension truncated at kappa of arc length.
    SteerPath extend(const Pose& from, double to_x, double to_y) const {
        return steer_clf_path(from, to_x, to_y, clf, params.r_stop, steer_ds(), params.kappa,
                              params.steer_dt_max, params.steer_max_steps);
    }

    bool collision_free(const SteerPath& p) const {
        for (const Pose& q : p.poses) {
            if (!map->traversable_xy(q.x, q.y)) return false;
        }
        return true;
    }

    /// Edge cost c = d + k_t * T(path); nullopt if the path is untraversable.
    std::optional<double> edge_cost(const Pose& from, const Pose& to,
                                    const SteerPath& path) const {
        const auto trav = path_traversability(*map, z_r, path_points(path), weights);
        if (!trav) return std::nullopt;
        return clf_distance(from, to, clf, params) + params.k_t * *trav;
    }

    /// Cheap traversability along the straight segment, used as a surrogate
    /// where steering every candidate would be prohibitive.
    double line_traversability(const Pose& from, double to_x, double to_y) const {
        const auto trav =
            path_traversability(*map, z_r, {{from.x, from.y}, {to_x, to_y}}, weights);
        return trav ? *trav : 1e9;
    }
};

struct Node {
    Pose pose;
    int parent = -1;
    double cost_from_root = 0.0;
    double edge_cost = 0.0;           // c(parent, this)
    std::vector<int> children;
    double trav_from_robot = 0.0;     // T(node, P) cache for the near-set gate
    std::vector<Pose> edge_path;      // steering path from the parent
};

class Tree {
  public:
    explicit Tree(const Pose& root) {
        Node r;
        r.pose = root;
        nodes_.push_back(std::move(r));
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const Pose& root_pose() const { return nodes_[0].pose; }

    int insert(const Pose& pose, int parent, double edge_cost, std::vector<Pose> edge_path,
               double trav_from_robot) {
        Node n;
        n.pose = pose;
        n.parent = parent;
        n.edge_cost = edge_cost;
        n.cost_from_root = nodes_[static_cast<std::size_t>(parent)].cost_from_root + edge_cost;
        n.edge_path = std::move(edge_path);
        n.trav_from_robot = trav_from_robot;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(std::move(n));
        nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
        return id;
    }

    bool is_ancestor(int candidate, int of) const {
        for (int cur = of; cur != -1; cur = nodes_[static_cast<std::size_t>(cur)].parent) {
            if (cur == candidate) return true;
        }
        return false;
    }

    void reparent(int id, int new_parent, double edge_cost, std::vector<Pose> edge_path) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        auto& old_children = nodes_[static_cast<std::size_t>(n.parent)].children;
        old_children.erase(std::find(old_children.begin(), old_children.end(), id));
        n.parent = new_parent;
        n.edge_cost = edge_cost;
        n.edge_path = std::move(edge_path);
        nodes_[static_cast<std::size_t>(new_parent)].children.push_back(id);
        const double new_cost =
            nodes_[static_cast<std::size_t>(new_parent)].cost_from_root + edge_cost;
        const double delta = new_cost - n.cost_from_root;
        propagate_cost_delta(id, delta);
    }

    std::vector<int> branch_to(int id) const {
        std::vector<int> chain;
        for (int cur = id; cur != -1; cur = nodes_[static_cast<std::size_t>(cur)].parent) {
            chain.push_back(cur);
        }
        std::reverse(chain.begin(), chain.end());
        return chain;
    }

  private:
    void propagate_cost_delta(int id, double delta) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.cost_from_root += delta;
        for (int c : n.children) propagate_cost_delta(c, delta);
    }

    std::vector<Node> nodes_;
};

/// RRT* near radius L(m) = eta (log m / m)^(1/xi), with L(1) = eta.
inline double near_radius(const PlannerParams& p, std::size_t m) {
    if (m <= 1) return p.eta;
    const double lm = std::max(std::log(static_cast<double>(m)), 1e-9);
    return p.eta * std::pow(lm / static_cast<double>(m), 1.0 / p.xi);
}

/// Nearest node by cost toward `to`. A cheap CLF-distance pass shortlists
/// candidates; the straight-line traversability surrogate then refines the
/// shortlist. Ties break to the lowest id.
inline int nearest(const Tree& tree, const Pose& to, const PlanContext& ctx) {
    constexpr std::size_t kShortlist = 8;
    struct Entry {
        double d;
        int id;
    };
    std::vector<Entry> shortlist;
    shortlist.reserve(kShortlist + 1);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const double d = clf_distance(tree.node(static_cast<int>(i)).pose, to, ctx.clf, ctx.params);
        if (shortlist.size() == kShortlist && d >= shortlist.back().d) continue;
        const Entry e{d, static_cast<int>(i)};
        shortlist.insert(std::upper_bound(shortlist.begin(), shortlist.end(), e,
                                          [](const Entry& a, const Entry& b) {
                                              return a.d != b.d ? a.d < b.d : a.id < b.id;
                                          }),
                         e);
        if (shortlist.size() > kShortlist) shortlist.pop_back();
    }
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const Entry& e : shortlist) {
        const Node& v = tree.node(e.id);
        const double c = e.d + ctx.params.k_t * ctx.line_traversability(v.pose, to.x, to.y);
        if (c < best_cost || (c == best_cost && e.id < best)) {
            best_cost = c;
            best = e.id;
        }
    }
    return best;
}

namespace detail {

inline std::vector<int> near_set(const Tree& tree, const Pose& n, double trav_n, bool to_n,
                                 const PlanContext& ctx) {
    const double radius = near_radius(ctx.params, tree.size());
    struct Entry {
        double d;
        int id;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const Node& v = tree.node(static_cast<int>(i));
        const double d = to_n ? clf_distance(v.pose, n, ctx.clf, ctx.params)
                              : clf_distance(n, v.pose, ctx.clf, ctx.params);
        if (d > radius) continue;
        if (!std::isfinite(trav_n) || !std::isfinite(v.trav_from_robot)) continue;
        if (std::abs(v.trav_from_robot - trav_n) > ctx.params.t_k) continue;
        entries.push_back({d, static_cast<int>(i)});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.d != b.d ? a.d < b.d : a.id < b.id;
    });
    if (entries.size() > ctx.params.max_near) entries.resize(ctx.params.max_near);
    std::vector<int> ids;
    ids.reserve(entries.size());
    for (const Entry& e : entries) ids.push_back(e.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace detail

/// Near-to nodes: cheap to reach the new pose from.
inline std::vector<int> near_to(const Tree& tree, const Pose& n, double trav_n,
                                const PlanContext& ctx) {
    return detail::near_set(tree, n, trav_n, true, ctx);
}

/// Near-from nodes: cheaply reached from the new pose.
inline std::vector<int> near_from(const Tree& tree, const Pose& n, double trav_n,
                                  const PlanContext& ctx) {
    return detail::near_set(tree, n, trav_n, false, ctx);
}

struct ParentChoice {
    int parent = -1;
    double edge_cost = 0.0;
    double total_cost = 0.0;
    Pose end_pose;  // heading produced by the winning steer
    std::vector<Pose> edge_path;
};

/// Minimum-cost parent among the near-to set and the nearest node. The
/// nearest node's extension path is reused; other candidates are steered to
/// the new position. Ties keep the earlier (lower-id) candidate.
inline std::optional<ParentChoice> choose_parent(const Tree& tree, const std::vector<int>& near,
                                                 int nearest_id, const Pose& n_new,
                                                 const SteerPath& extend_path,
                                                 const PlanContext& ctx) {
    std::optional<ParentChoice> best;
    auto consider = [&](int id, const SteerPath& path) {
        if (!ctx.collision_free(path)) return;
        const auto c = ctx.edge_cost(tree.node(id).pose, n_new, path);
        if (!c) return;
        const double total = tree.node(id).cost_from_root + *c;
        if (!best || total < best->total_cost) {
            best = ParentChoice{id, *c, total, path.poses.back(), path.poses};
        }
    };
    consider(nearest_id, extend_path);
    for (int id : near) {
        if (id == nearest_id) continue;
        const auto path = ctx.steer(tree.node(id).pose, n_new.x, n_new.y);
        if (path) consider(id, *path);
    }
    return best;
}

/// Rewire near-from nodes through n_new where this lowers their cost.
inline void rewire(Tree& tree, const std::vector<int>& near, int n_min, int n_new,
                   const PlanContext& ctx) {
    for (int id : near) {
        if (id == n_min || id == n_new || id == ctx.params.pinned_node ||
            tree.is_ancestor(id, n_new)) {
            continue;
        }
        const Node& v = tree.node(id);
        const auto path = ctx.steer(tree.node(n_new).pose, v.pose.x, v.pose.y);
        if (!path || !ctx.collision_free(*path)) continue;
        const auto c = ctx.edge_cost(tree.node(n_new).pose, v.pose, *path);
        if (!c) continue;
        if (tree.node(n_new).cost_from_root + *c < v.cost_from_root - 1e-12) {
            tree.reparent(id, n_new, *c, path->poses);
        }
    }
}

/// Sample a pose: goal with probability goal_bias, otherwise a traversable
/// position (uniform over the map, or Gaussian around the root-goal segment)
/// with a uniform heading.
inline Pose sample(Rng& rng, const LayeredGridMap& map, const GoalPosition& goal,
                   const PlannerParams& params, const Pose& root) {
    auto heading = [&] { return rng.uniform(-M_PI, M_PI); };
    if (rng.uniform01() < params.goal_bias) {
        return {goal.x, goal.y, heading()};
    }
    const double half = map.resolution() / 2.0;
    const double min_x = map.origin_x() - half;
    const double max_x = map.origin_x() + (map.width() - 1) * map.resolution() + half;
    const double min_y = map.origin_y() - half;
    const double max_y = map.origin_y() + (map.height() - 1) * map.resolution() + half;
    for (int tries = 0; tries < 200; ++tries) {
        double x, y;
        if (params.gaussian_sampling_sigma > 0.0) {
            const double t = rng.uniform01();
            x = rng.normal(root.x + t * (goal.x - root.x), params.gaussian_sampling_sigma);
            y = rng.normal(root.y + t * (goal.y - root.y), params.gaussian_sampling_sigma);
        } else {
            x = rng.uniform(min_x, max_x);
            y = rng.uniform(min_y, max_y);
        }
        if (map.traversable_xy(x, y)) {
            return {x, y, heading()};
        }
    }
    return {goal.x, goal.y, heading()};
}

/// Immutable published plan: way-poses from the root toward the goal.
struct PathSnapshot {
    std::vector<Pose> wayposes;
    std::size_t active_index = 0;  // first unreached way-pose
    std::uint64_t epoch = 0;
    double cost = 0.0;
    bool reaches_goal = false;
    GoalPosition goal;

    bool empty() const { return wayposes.empty(); }
};

struct PlanResult {
    std::optional<Tree> tree;
    PathSnapshot snapshot;
    bool reached_goal = false;
    bool failed = false;  // root untraversable or the tree never left the root
    std::size_t iterations = 0;
};

/// Grow (or continue growing) the tree for a fixed number of iterations, then
/// extract the best branch as a snapshot. Deterministic given (rng, map,
/// params).
inline void grow_tree(Tree& tree, const GoalPosition& goal, const PlanContext& ctx, Rng& rng,
                      std::size_t iterations) {
    for (std::size_t i = 0; i < iterations; ++i) {
        const Pose n_rand = sample(rng, *ctx.map, goal, ctx.params, tree.root_pose());
        const int near_id = nearest(tree, n_rand, ctx);
        const SteerPath ext = ctx.extend(tree.node(near_id).pose, n_rand.x, n_rand.y);
        if (ext.poses.size() < 2 || ext.arc_length < ctx.map->resolution()) continue;
        if (!ctx.collision_free(ext)) continue;
        const Pose n_new = ext.poses.back();

        // T(n, P) cache: traversability of the direct CLF path from the root.
        double trav_new = std::numeric_limits<double>::infinity();
        if (const auto direct = ctx.steer(tree.root_pose(), n_new.x, n_new.y)) {
            if (const auto t = path_traversability(*ctx.map, ctx.z_r, path_points(*direct),
                                                   ctx.weights)) {
                trav_new = *t;
            }
        }

        const auto nt = near_to(tree, n_new, trav_new, ctx);
        const auto parent = choose_parent(tree, nt, near_id, n_new, ext, ctx);
        if (!parent) continue;
        const int new_id = tree.insert(parent->end_pose, parent->parent, parent->edge_cost,
                                       parent->edge_path, trav_new);
        const auto nf = near_from(tree, tree.node(new_id).pose, trav_new, ctx);
        rewire(tree, nf, parent->parent, new_id, ctx);
    }
}

/// Best branch: the cheapest node inside the goal region, or failing that the
/// node closest to the goal in the CLF distance.
inline std::pair<int, bool> best_goal_node(const Tree& tree, const GoalPosition& goal,
                                           const PlanContext& ctx, int required_ancestor = -1) {
    int best_in_goal = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    int best_near = required_ancestor >= 0 ? required_ancestor : 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (required_ancestor >= 0 &&
            !tree.is_ancestor(required_ancestor, static_cast<int>(i))) {
            continue;
        }
        const Node& v = tree.node(static_cast<int>(i));
        if (distance_xy(v.pose, goal) < ctx.params.r_stop) {
            if (v.cost_from_root < best_cost) {
                best_cost = v.cost_from_root;
                best_in_goal = static_cast<int>(i);
            }
        }
        const double d = clf_distance(v.pose, goal.x, goal.y, ctx.clf, ctx.params);
        if (d < best_d) {
            best_d = d;
            best_near = static_cast<int>(i);
        }
    }
    if (best_in_goal >= 0) return {best_in_goal, true};
    return {best_near, false};
}

inline PathSnapshot snapshot_from_tree(const Tree& tree, const GoalPosition& goal,
                                       const PlanContext& ctx, std::uint64_t epoch,
                                       int required_ancestor = -1) {
    const auto [best, reached] = best_goal_node(tree, goal, ctx, required_ancestor);
    PathSnapshot snap;
    snap.goal = goal;
    snap.epoch = epoch;
    snap.reaches_goal = reached;
    snap.cost = tree.node(best).cost_from_root;
    for (int id : tree.branch_to(best)) snap.wayposes.push_back(tree.node(id).pose);
    snap.active_index = snap.wayposes.size() > 1 ? 1 : 0;
    return snap;
}

inline PlanResult plan(const Pose& root, const GoalPosition& goal, const PlanContext& ctx,
                       Rng& rng, std::size_t iterations, std::uint64_t epoch = 0) {
    PlanResult result;
    if (!ctx.map->traversable_xy(root.x, root.y)) {
        result.failed = true;
        return result;
    }
    Tree tree(root);
    grow_tree(tree, goal, ctx, rng, iterations);
    result.iterations = iterations;
    result.snapshot = snapshot_from_tree(tree, goal, ctx, epoch);
    result.reached_goal = result.snapshot.reaches_goal;
    result.failed = tree.size() <= 1 && !result.reached_goal;
    result.tree = std::move(tree);
    return result;
}

/// Rebuild a tree from the previous snapshot's unreached branch, re-rooted at
/// the current robot pose. The first unreached way-pose is preserved verbatim.
/// Any invalid retained edge discards the whole branch and returns a fresh
/// single-node tree.
inline Tree warm_start(const PathSnapshot& previous, const Pose& new_root,
                       const PlanContext& ctx, double reached_radius = 0.0) {
    Tree tree(new_root);
    if (previous.empty()) return tree;
    // Way-poses the robot has effectively reached would seed a node on top of
    // the root; the executor is about to skip them anyway.
    std::size_t first = previous.active_index;
    while (first < previous.wayposes.size() &&
           distance_xy(new_root, GoalPosition{previous.wayposes[first].x,
                                              previous.wayposes[first].y}) <= reached_radius) {
        ++first;
    }
    if (first >= previous.wayposes.size()) return tree;
    Tree seeded(new_root);
    Pose from = new_root;
    int parent = 0;
    for (std::size_t k = first; k < previous.wayposes.size(); ++k) {
        const Pose wp = previous.wayposes[k];
        const auto path = ctx.steer(from, wp.x, wp.y);
        if (!path || !ctx.collision_free(*path)) {
            return tree;  // branch invalidated, start from scratch
        }
        const auto c = ctx.edge_cost(from, wp, *path);
        if (!c) return tree;
        double trav = std::numeric_limits<double>::infinity();
        if (const auto direct = ctx.steer(new_root, wp.x, wp.y)) {
            if (const auto t =
                    path_traversability(*ctx.map, ctx.z_r, path_points(*direct), ctx.weights)) {
                trav = *t;
            }
        }
        parent = seeded.insert(wp, parent, *c, path->poses, trav);
        from = wp;
    }
    return seeded;
}

/// One JSON object per line: node id, pose, parent, cost.
inline std::string tree_to_jsonl(const Tree& tree) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const Node& n = tree.node(static_cast<int>(i));
        out << "{\"id\":" << i << ",\"x\":" << n.pose.x << ",\"y\":" << n.pose.y
            << ",\"theta\":" << n.pose.theta << ",\"parent\":" << n.parent
            << ",\"cost\":" << n.cost_from_root << "}\n";
    }
    return out.str();
}

}  // namespace omniplan
