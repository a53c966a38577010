#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "omniplan/clf.hpp"
#include "omniplan/rng.hpp"

using namespace omniplan;

namespace {

ClfParams random_params(Rng& rng) {
    ClfParams p;
    p.alpha = rng.uniform(0.5, 100.0);
    p.beta = rng.uniform(0.5, 2.0);
    p.gamma = rng.uniform(0.1, 3.0);
    p.k_r1 = rng.uniform(0.2, 3.0);
    p.k_r2 = rng.uniform(1.0, 10.0);
    p.k_d1 = rng.uniform(0.02, 1.0);
    p.k_d2 = rng.uniform(1.0, 20.0);
    return p;
}

}  // namespace

TEST_CASE("clf_value fixed points") {
    const ClfParams p;
    CHECK(clf_value({0.0, 0.0}, p) == 0.0);
    CHECK(clf_value({1.0, 0.0}, p) == Catch::Approx(0.5));
    CHECK(clf_value({2.0 * std::sqrt(2.0), M_PI / 3.0}, p) ==
          Catch::Approx(4.45225).margin(5e-5));
}

TEST_CASE("clf_feedback fixed points") {
    const ClfParams p;
    {
        const VirtualInputs u = clf_feedback({0.0, 1.3}, p);
        CHECK(u.v_r == 0.0);
        CHECK(u.v_delta == 0.0);
    }
    {
        const VirtualInputs u = clf_feedback({5.0, 0.0}, p);
        CHECK(u.v_r == Catch::Approx(0.5));
        CHECK(u.v_delta == Catch::Approx(0.0).margin(1e-15));
    }
    {
        // On the repulsive band edge: sin(2 beta delta) = sin(pi) = 0.
        const VirtualInputs u = clf_feedback({5.0, M_PI / (2.0 * 1.2)}, p);
        CHECK(u.v_r == Catch::Approx(0.5));
        CHECK(u.v_delta == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("clf_derivative fixed points and sign") {
    const ClfParams p;
    CHECK(clf_derivative({0.0, 0.5}, p) == Catch::Approx(0.0).margin(1e-15));
    CHECK(clf_derivative({5.0, 0.0}, p) == Catch::Approx(-2.5));
    Rng rng(11);
    for (int i = 0; i < 20000; ++i) {
        const ClfParams q = random_params(rng);
        const EgoPolarState s{rng.uniform(1e-6, 50.0), rng.uniform(-M_PI, M_PI)};
        CHECK(clf_derivative(s, q) < 0.0);
    }
}

TEST_CASE("clf_derivative matches the chain rule under the feedback") {
    // d(ell)/dt = (d ell/d r)(-v_r) + (d ell/d delta) v_delta.
    Rng rng(12);
    for (int i = 0; i < 5000; ++i) {
        const ClfParams p = random_params(rng);
        const EgoPolarState s{rng.uniform(0.01, 40.0), rng.uniform(-3.0, 3.0)};
        const VirtualInputs u = clf_feedback(s, p);
        const double dl_dr = s.r;
        const double dl_dd =
            p.gamma * p.gamma * p.beta * std::sin(p.beta * s.delta) * std::cos(p.beta * s.delta);
        const double chain = dl_dr * (-u.v_r) + dl_dd * u.v_delta;
        CHECK(clf_derivative(s, p) == Catch::Approx(chain).margin(1e-9));
    }
}

TEST_CASE("virtual-command round trip") {
    Rng rng(13);
    for (int i = 0; i < 20000; ++i) {
        const EgoPolarState s{rng.uniform(0.01, 30.0), rng.uniform(-M_PI, M_PI)};
        const VirtualInputs u{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const double omega = rng.uniform(-2.0, 2.0);
        const Command c = virtual_to_command(s, u, omega);
        const VirtualInputs back = command_to_virtual(s, c);
        CHECK(back.v_r == Catch::Approx(u.v_r).margin(1e-9));
        CHECK(back.v_delta == Catch::Approx(u.v_delta).margin(1e-9));
    }
}

TEST_CASE("in_fov boundary") {
    const ClfParams p;
    CHECK(fov_half_angle(p) == Catch::Approx(75.0 * M_PI / 180.0));
    CHECK(in_fov(0.0, p));
    CHECK_FALSE(in_fov(M_PI / (2.0 * 1.2), p));  // boundary excluded
    CHECK_FALSE(in_fov(M_PI, p));
}

TEST_CASE("clf_commands on the straight-ahead manifold") {
    const ClfParams p;
    const Command c = clf_commands({5.0, 0.0}, p);
    CHECK(c.v_x == Catch::Approx(0.5));
    CHECK(c.v_y == Catch::Approx(0.0).margin(1e-15));
    CHECK(c.omega == Catch::Approx(0.0).margin(1e-15));
    const Command zero = clf_commands({0.0, 0.0}, p);
    CHECK(zero.v_x == 0.0);
    CHECK(zero.v_y == 0.0);
    CHECK(zero.omega == 0.0);
}

namespace {

// Brute-force minimizer of v_y^2 + alpha omega^2 over omega, with v_y given by
// the constraint inverse at the feedback virtual inputs.
double grid_best_omega(const EgoPolarState& s, const ClfParams& p) {
    const VirtualInputs u = clf_feedback(s, p);
    const double cd = std::cos(s.delta);
    const double sd = std::sin(s.delta);
    double best_w = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (double w = -5.0; w <= 5.0 + 1e-12; w += 1e-4) {
        const double v_y = u.v_r * sd - s.r * (u.v_delta + w) * cd;
        const double cost = v_y * v_y + p.alpha * w * w;
        if (cost < best_cost) {
            best_cost = cost;
            best_w = w;
        }
    }
    return best_w;
}

}  // namespace

TEST_CASE("clf_commands yaw rate matches a grid minimizer") {
    const ClfParams p;
    const EgoPolarState s{2.0 * std::sqrt(2.0), M_PI / 3.0};
    CHECK(clf_commands(s, p).omega == Catch::Approx(grid_best_omega(s, p)).margin(2e-4));

    Rng rng(14);
    for (int i = 0; i < 50; ++i) {
        const EgoPolarState q{rng.uniform(0.1, 25.0), rng.uniform(-1.3, 1.3)};
        CHECK(clf_commands(q, p).omega == Catch::Approx(grid_best_omega(q, p)).margin(2e-4));
    }
}

TEST_CASE("larger yaw penalty shrinks the commanded yaw rate") {
    ClfParams p10;
    p10.alpha = 10.0;
    ClfParams p100;
    p100.alpha = 100.0;
    const EgoPolarState s{15.0 * std::sqrt(2.0), M_PI / 3.0};
    CHECK(std::abs(clf_commands(s, p100).omega) < std::abs(clf_commands(s, p10).omega));
}

TEST_CASE("closed loop straight ahead stays on axis") {
    const ClfParams p;
    const auto res = simulate_closed_loop({0.0, 0.0, 0.0}, {5.0, 0.0}, p, 0.01, 0.05, 200000);
    REQUIRE(res.converged);
    double prev_x = -1.0;
    for (const auto& s : res.samples) {
        CHECK(s.pose.x >= prev_x);
        prev_x = s.pose.x;
        CHECK(std::abs(s.pose.y) < 1e-9);
        CHECK(std::abs(s.command.v_y) < 1e-9);
        CHECK(std::abs(s.command.omega) < 1e-9);
    }
}

TEST_CASE("closed loop converges from a 60 degree bearing error") {
    const ClfParams p;
    const double r0 = 2.0 * std::sqrt(2.0);
    const double d0 = M_PI / 3.0;
    // Put the goal at the origin and pick the pose accordingly.
    const Pose start{-r0, 0.0, -d0};
    const auto res = simulate_closed_loop(start, {0.0, 0.0}, p, 0.01, 0.05, 400000);
    CHECK(res.converged);
}

TEST_CASE("bearing error falls below 10 degrees well before arrival") {
    const ClfParams p;
    const double d0 = 40.0 * M_PI / 180.0;
    const Pose start{-15.0, 0.0, -d0};
    const auto res = simulate_closed_loop(start, {0.0, 0.0}, p, 0.01, 0.05, 400000);
    REQUIRE(res.converged);
    bool small_before_5m = false;
    for (const auto& s : res.samples) {
        const EgoPolarState e = to_egopolar(s.pose, {0.0, 0.0});
        if (e.r >= 5.0 && std::abs(e.delta) < 10.0 * M_PI / 180.0) small_before_5m = true;
        if (e.r < 5.0) break;
    }
    CHECK(small_before_5m);
}

TEST_CASE("bearing manifolds: zero attracts, band edge repels") {
    const ClfParams p;
    const double edge = M_PI / (2.0 * p.beta);
    for (double r : {2.0, 10.0, 30.0}) {
        // Perturbations off zero head back toward zero.
        CHECK(clf_feedback({r, 0.05}, p).v_delta < 0.0);
        CHECK(clf_feedback({r, -0.05}, p).v_delta > 0.0);
        // Perturbations off the band edge leave it.
        CHECK(clf_feedback({r, edge - 0.05}, p).v_delta < 0.0);
        CHECK(clf_feedback({r, edge + 0.05}, p).v_delta > 0.0);
    }
}

TEST_CASE("command clamping") {
    const CommandLimits lim;
    const Command c = clamp_command({2.0, -1.0, 0.9}, lim);
    CHECK(c.v_x == 1.0);
    CHECK(c.v_y == -0.3);
    CHECK(c.omega == 0.6);
}

TEST_CASE("parameter validation") {
    ClfParams p;
    CHECK_NOTHROW(p.validate());
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
}
