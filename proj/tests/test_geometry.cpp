#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "omniplan/geometry.hpp"
#include "omniplan/rng.hpp"

using namespace omniplan;

TEST_CASE("wrap_angle fixed values") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(3.0 * M_PI) == Catch::Approx(M_PI).margin(1e-12));
    CHECK(wrap_angle(-3.7851) == Catch::Approx(2.49808530718).margin(1e-9));
    CHECK(wrap_angle(2.0 * M_PI) == Catch::Approx(0.0).margin(1e-12));
    // The boundary maps to +pi, never -pi.
    CHECK(wrap_angle(-M_PI) == M_PI);
    CHECK(wrap_angle(M_PI) == M_PI);
}

TEST_CASE("wrap_angle rejects non-finite input") {
    CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("wrap_angle range and equivalence over random angles") {
    Rng rng(42);
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.uniform(-100.0, 100.0);
        const double w = wrap_angle(a);
        CHECK(w > -M_PI);
        CHECK(w <= M_PI);
        // Same angle modulo 2 pi.
        CHECK(std::remainder(a - w, 2.0 * M_PI) == Catch::Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("to_egopolar fixed values") {
    {
        const EgoPolarState s = to_egopolar({0.0, 0.0, 0.0}, {1.0, 0.0});
        CHECK(s.r == Catch::Approx(1.0));
        CHECK(s.delta == Catch::Approx(0.0).margin(1e-15));
    }
    {
        const EgoPolarState s = to_egopolar({0.0, 0.0, 0.0}, {0.0, 1.0});
        CHECK(s.r == Catch::Approx(1.0));
        CHECK(s.delta == Catch::Approx(M_PI / 2.0));
    }
    {
        const EgoPolarState s = to_egopolar({3.0, 4.0, M_PI / 2.0}, {0.0, 0.0});
        CHECK(s.r == Catch::Approx(5.0));
        CHECK(s.delta == Catch::Approx(wrap_angle(std::atan2(-4.0, -3.0) - M_PI / 2.0))
                             .margin(1e-12));
        CHECK(s.delta == Catch::Approx(2.49808530718).margin(1e-4));
    }
}

TEST_CASE("to_egopolar at zero range") {
    const EgoPolarState s = to_egopolar({2.0, -1.0, 0.7}, {2.0, -1.0});
    CHECK(s.r == 0.0);
    CHECK(s.delta == 0.0);
}

TEST_CASE("to_egopolar is invariant under rigid motions") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const Pose pose{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0),
                        rng.uniform(-M_PI, M_PI)};
        const GoalPosition goal{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        const EgoPolarState base = to_egopolar(pose, goal);

        const double tx = rng.uniform(-10.0, 10.0);
        const double ty = rng.uniform(-10.0, 10.0);
        const double rot = rng.uniform(-M_PI, M_PI);
        const double c = std::cos(rot);
        const double s = std::sin(rot);
        const Pose moved{c * pose.x - s * pose.y + tx, s * pose.x + c * pose.y + ty,
                         wrap_angle(pose.theta + rot)};
        const GoalPosition moved_goal{c * goal.x - s * goal.y + tx, s * goal.x + c * goal.y + ty};
        const EgoPolarState xf = to_egopolar(moved, moved_goal);

        CHECK(xf.r == Catch::Approx(base.r).margin(1e-9));
        if (base.r > 1e-9) {
            CHECK(wrap_angle(xf.delta - base.delta) == Catch::Approx(0.0).margin(1e-9));
        }
    }
}

TEST_CASE("distance_xy") {
    CHECK(distance_xy(Pose{0.0, 0.0, 0.3}, GoalPosition{3.0, 4.0}) == Catch::Approx(5.0));
    CHECK(distance_xy(Pose{1.0, 1.0, 0.0}, Pose{1.0, 1.0, 2.0}) == 0.0);
}
