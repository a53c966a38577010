#pragma once

#include <cmath>
#include <stdexcept>

namespace omniplan {

/// Robot configuration in the plane. theta is kept wrapped in (-pi, pi].
struct Pose {
    double x = 0.0;      // meters
    double y = 0.0;      // meters
    double theta = 0.0;  // radians, (-pi, pi]
};

/// Target position; the goal has no heading.
struct GoalPosition {
    double x = 0.0;  // meters
    double y = 0.0;  // meters
};

/// Goal expressed relative to the robot: range r and bearing error delta.
/// delta = line-of-sight angle minus heading; positive delta means the goal
/// lies to the robot's left. When r == 0 delta is 0 by convention.
struct EgoPolarState {
    double r = 0.0;      // meters, >= 0
    double delta = 0.0;  // radians, (-pi, pi]
};

/// Wrap an angle into (-pi, pi]. Exactly -pi maps to +pi.
inline double wrap_angle(double a) {
    if (!std::isfinite(a)) {
        throw std::domain_error("wrap_angle: non-finite angle");
    }
    double w = std::remainder(a, 2.0 * M_PI);  // [-pi, pi]
    if (w <= -M_PI) {
        w = M_PI;
    }
    return w;
}

inline EgoPolarState to_egopolar(const Pose& pose, const GoalPosition& goal) {
    const double dx = goal.x - pose.x;
    const double dy = goal.y - pose.y;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) {
        return {0.0, 0.0};
    }
    return {r, wrap_angle(std::atan2(dy, dx) - pose.theta)};
}

inline double distance_xy(const Pose& a, const GoalPosition& b) {
    return std::hypot(b.x - a.x, b.y - a.y);
}

inline double distance_xy(const Pose& a, const Pose& b) {
    return std::hypot(b.x - a.x, b.y - a.y);
}

}  // namespace omniplan
