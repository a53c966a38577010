#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "omniplan/geometry.hpp"

namespace omniplan {

/// CLF gains. Defaults match the controller's reference parameter set.
struct ClfParams {
    double alpha = 10.0;   // yaw-motion penalty in the command optimization
    double beta = 1.2;     // bearing scaling; FoV is |delta| < pi/(2 beta)
    double gamma = 1.0;    // meters, orientation weight in the CLF
    double k_r1 = 1.0;     // m/s, radial closure gain
    double k_r2 = 5.0;     // meters, radial saturation distance
    double k_d1 = 0.1;     // 1/s, bearing gain
    double k_d2 = 10.0;    // meters, bearing saturation distance

    void validate() const {
        if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma >= 0.0) || !(k_r1 > 0.0) ||
            !(k_r2 > 0.0) || !(k_d1 > 0.0) || !(k_d2 > 0.0)) {
            throw std::domain_error("ClfParams: gains out of range");
        }
    }
};

/// Velocity command: longitudinal, lateral (positive left), yaw rate (ccw).
struct Command {
    double v_x = 0.0;    // m/s
    double v_y = 0.0;    // m/s
    double omega = 0.0;  // rad/s
};

/// Feedback-linearized virtual inputs: dr/dt = -v_r, ddelta/dt = v_delta.
struct VirtualInputs {
    double v_r = 0.0;      // m/s
    double v_delta = 0.0;  // rad/s
};

/// Symmetric-by-default command clamps for a biped-like platform.
struct CommandLimits {
    double v_x_min = -0.3;
    double v_x_max = 1.0;
    double v_y_min = -0.3;
    double v_y_max = 0.3;
    double omega_min = -0.6;
    double omega_max = 0.6;
};

inline Command clamp_command(const Command& c, const CommandLimits& lim) {
    auto clamp = [](double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); };
    return {clamp(c.v_x, lim.v_x_min, lim.v_x_max), clamp(c.v_y, lim.v_y_min, lim.v_y_max),
            clamp(c.omega, lim.omega_min, lim.omega_max)};
}

/// ell = (r^2 + gamma^2 sin^2(beta delta)) / 2
inline double clf_value(const EgoPolarState& s, const ClfParams& p) {
    const double sb = std::sin(p.beta * s.delta);
    return 0.5 * (s.r * s.r + p.gamma * p.gamma * sb * sb);
}

inline VirtualInputs clf_feedback(const EgoPolarState& s, const ClfParams& p) {
    const double v_r = p.k_r1 * s.r / (p.k_r2 + s.r);
    const double v_delta =
        -(2.0 / p.beta) * p.k_d1 * (s.r / (p.k_d2 + s.r)) * std::sin(2.0 * p.beta * s.delta);
    return {v_r, v_delta};
}

/// d(ell)/dt under the virtual-input feedback; strictly negative for r > 0.
inline double clf_derivative(const EgoPolarState& s, const ClfParams& p) {
    const double s2 = std::sin(2.0 * p.beta * s.delta);
    return -(p.k_r1 / (p.k_r2 + s.r)) * s.r * s.r -
           p.gamma * p.gamma * p.k_d1 * (s.r / (p.k_d2 + s.r)) * s2 * s2;
}

inline double fov_half_angle(const ClfParams& p) { return M_PI / (2.0 * p.beta); }

/// True iff |delta| is strictly inside the repulsive-manifold band.
inline bool in_fov(double delta, const ClfParams& p) {
    return std::abs(delta) < fov_half_angle(p);
}

/// Map (v_r, v_delta, omega) to body commands. With delta measured
/// positive-left, the bearing dynamics are ddelta/dt = (v_x sin d - v_y cos d)/r - omega,
/// so the inverse carries (v_delta + omega).
inline Command virtual_to_command(const EgoPolarState& s, const VirtualInputs& u, double omega) {
    const double cd = std::cos(s.delta);
    const double sd = std::sin(s.delta);
    const double k = s.r * (u.v_delta + omega);
    return {u.v_r * cd + k * sd, u.v_r * sd - k * cd, omega};
}

/// Recover (v_r, v_delta) from a body command at state s.
inline VirtualInputs command_to_virtual(const EgoPolarState& s, const Command& c) {
    const double cd = std::cos(s.delta);
    const double sd = std::sin(s.delta);
    return {c.v_x * cd + c.v_y * sd, (c.v_x * sd - c.v_y * cd) / s.r - c.omega};
}

/// Closed-form command: omega minimizes v_y^2 + alpha omega^2 subject to the
/// virtual-input constraint, then v_x, v_y follow from the constraint inverse.
/// r = 0 returns the zero command.
inline Command clf_commands(const EgoPolarState& s, const ClfParams& p) {
    if (s.r == 0.0) {
        return {};
    }
    const VirtualInputs u = clf_feedback(s, p);
    const double cd = std::cos(s.delta);
    const double sd = std::sin(s.delta);
    const double denom = p.alpha + s.r * s.r * cd * cd;
    const double omega = s.r * cd * (u.v_r * sd - s.r * u.v_delta * cd) / denom;
    return virtual_to_command(s, u, omega);
}

struct ClosedLoopSample {
    double t = 0.0;
    Pose pose;
    Command command;
};

struct ClosedLoopResult {
    std::vector<ClosedLoopSample> samples;
    bool converged = false;
};

/// World-frame kinematics of an omnidirectional platform.
inline Pose pose_derivative(const Pose& pose, const Command& c) {
    const double ct = std::cos(pose.theta);
    const double st = std::sin(pose.theta);
    return {c.v_x * ct - c.v_y * st, c.v_x * st + c.v_y * ct, c.omega};
}

namespace detail {

template <typename CommandFn>
Pose rk4_pose_step(const Pose& pose, double dt, CommandFn&& cmd_at) {
    auto deriv = [&](const Pose& q) { return pose_derivative(q, cmd_at(q)); };
    auto advance = [](const Pose& q, const Pose& d, double h) {
        return Pose{q.x + d.x * h, q.y + d.y * h, q.theta + d.theta * h};
    };
    const Pose k1 = deriv(pose);
    const Pose k2 = deriv(advance(pose, k1, dt / 2.0));
    const Pose k3 = deriv(advance(pose, k2, dt / 2.0));
    const Pose k4 = deriv(advance(pose, k3, dt));
    Pose out{pose.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
             pose.y + dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
             pose.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta)};
    out.theta = wrap_angle(out.theta);
    return out;
}

}  // namespace detail

/// Integrate the CLF closed loop with fixed-step RK4 until r < r_stop or the
/// step budget runs out. Commands are re-evaluated at every RK4 substage.
inline ClosedLoopResult simulate_closed_loop(const Pose& start, const GoalPosition& goal,
                                             const ClfParams& p, double dt, double r_stop,
                                             std::size_t max_steps,
                                             const std::optional<CommandLimits>& limits = {}) {
    if (!(dt > 0.0) || !(r_stop > 0.0)) {
        throw std::domain_error("simulate_closed_loop: dt and r_stop must be positive");
    }
    auto cmd_at = [&](const Pose& q) {
        Command c = clf_commands(to_egopolar(q, goal), p);
        return limits ? clamp_command(c, *limits) : c;
    };

    ClosedLoopResult result;
    Pose pose = start;
    result.samples.push_back({0.0, pose, cmd_at(pose)});
    for (std::size_t k = 0; k < max_steps; ++k) {
        if (to_egopolar(pose, goal).r < r_stop) {
            result.converged = true;
            return result;
        }
        pose = detail::rk4_pose_step(pose, dt, cmd_at);
        result.samples.push_back({static_cast<double>(k + 1) * dt, pose, cmd_at(pose)});
    }
    result.converged = to_egopolar(pose, goal).r < r_stop;
    return result;
}

}  // namespace omniplan
