#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "omniplan/clf.hpp"
#include "omniplan/geometry.hpp"
#include "omniplan/rng.hpp"

namespace omniplan {

struct AlipParams {
    double g = 9.81;   // m/s^2
    double H = 0.9;    // meters, CoM height
    double tau = 0.3;  // seconds, swing-phase duration
    double tau_jitter = 0.0;  // fraction; 0 disables step-timing jitter
    double sway_amplitude = 0.0;  // meters; 0 disables lateral sway noise

    double rho() const { return std::sqrt(g / H); }
    double xi() const { return rho() * tau; }

    void validate() const {
        if (!(H > 0.0) || !(tau > 0.0) || !(g > 0.0)) {
            throw std::domain_error("AlipParams: g, H, tau must be positive");
        }
    }
};

/// One-axis pendulum state: CoM position, CoM velocity, stance foot position.
struct AlipAxisState {
    double c = 0.0;   // meters
    double dc = 0.0;  // m/s
    double p = 0.0;   // meters, stance foot
};

struct AlipState {
    AlipAxisState x;
    AlipAxisState y;
    double theta = 0.0;
};

/// Step-to-step transition with the hyperbolic matrices; p held fixed.
inline AlipAxisState alip_step(const AlipAxisState& s, const AlipParams& prm, double tau) {
    const double rho = prm.rho();
    const double xi = rho * tau;
    const double ch = std::cosh(xi);
    const double sh = std::sinh(xi);
    AlipAxisState out;
    out.c = ch * s.c + (sh / rho) * s.dc + (1.0 - ch) * s.p;
    out.dc = rho * sh * s.c + ch * s.dc - rho * sh * s.p;
    out.p = s.p;
    return out;
}

inline AlipAxisState alip_step(const AlipAxisState& s, const AlipParams& prm) {
    return alip_step(s, prm, prm.tau);
}

/// CoM position within a step at elapsed time t in [0, tau].
inline double alip_com_at(const AlipAxisState& s, const AlipParams& prm, double t) {
    const double rho = prm.rho();
    return s.p + (s.c - s.p) * std::cosh(rho * t) + (s.dc / rho) * std::sinh(rho * t);
}

/// Foot placement making the step's average CoM velocity equal v_des.
inline double alip_foot_placement(const AlipAxisState& s, const AlipParams& prm, double v_des,
                                  double tau) {
    const double rho = prm.rho();
    const double xi = rho * tau;
    const double ch = std::cosh(xi);
    const double sh = std::sinh(xi);
    // c(tau) - c(0) = (c0 - p)(ch - 1) + (dc0 / rho) sh  ==  v_des * tau
    return s.c - (v_des * tau - (s.dc / rho) * sh) / (ch - 1.0);
}

struct AlipExecuteResult {
    AlipState state;
    bool command_clamped = false;
};

/// One full swing phase under a latched command: choose foot placements so the
/// post-step average velocity tracks the command rotated into the world frame,
/// advance both axes, advance heading by omega * tau.
inline AlipExecuteResult alip_execute(const AlipState& s, const Command& cmd,
                                      const AlipParams& prm,
                                      const std::optional<CommandLimits>& limits = {},
                                      double tau_override = -1.0) {
    Command c = cmd;
    bool clamped = false;
    if (limits) {
        c = clamp_command(cmd, *limits);
        clamped = c.v_x != cmd.v_x || c.v_y != cmd.v_y || c.omega != cmd.omega;
    }
    const double tau = tau_override > 0.0 ? tau_override : prm.tau;
    const double ct = std::cos(s.theta);
    const double st = std::sin(s.theta);
    const double vwx = c.v_x * ct - c.v_y * st;
    const double vwy = c.v_x * st + c.v_y * ct;

    AlipExecuteResult out;
    out.command_clamped = clamped;
    out.state = s;
    out.state.x.p = alip_foot_placement(s.x, prm, vwx, tau);
    out.state.y.p = alip_foot_placement(s.y, prm, vwy, tau);
    out.state.x = alip_step(out.state.x, prm, tau);
    out.state.y = alip_step(out.state.y, prm, tau);
    out.state.theta = wrap_angle(s.theta + c.omega * tau);
    return out;
}

/// RK4 step of the omnidirectional world-frame kinematics under a constant
/// command.
inline Pose omni_integrate(const Pose& pose, const Command& cmd, double dt) {
    return detail::rk4_pose_step(pose, dt, [&](const Pose&) { return cmd; });
}

/// Additive pose perturbation used by reactive-recovery tests.
inline Pose inject_disturbance(const Pose& pose, const Pose& offset) {
    return {pose.x + offset.x, pose.y + offset.y, wrap_angle(pose.theta + offset.theta)};
}

}  // namespace omniplan
