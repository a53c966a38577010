#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "omniplan/robots.hpp"
#include "omniplan/rng.hpp"

using namespace omniplan;

namespace {

// Orbital energy of the one-axis pendulum, conserved while the foot stays put.
double orbital_energy(const AlipAxisState& s, const AlipParams& prm) {
    const double rho = prm.rho();
    const double off = s.c - s.p;
    return 0.5 * s.dc * s.dc - 0.5 * rho * rho * off * off;
}

}  // namespace

TEST_CASE("pendulum rest on the stance foot is a fixed point") {
    const AlipParams prm;
    const AlipAxisState rest{0.4, 0.0, 0.4};
    const AlipAxisState out = alip_step(rest, prm);
    CHECK(out.c == Catch::Approx(0.4).margin(1e-12));
    CHECK(out.dc == Catch::Approx(0.0).margin(1e-12));
    CHECK(out.p == 0.4);
}

TEST_CASE("pendulum offset grows by cosh over one step") {
    const AlipParams prm;
    const AlipAxisState s{0.1, 0.0, 0.0};
    const AlipAxisState out = alip_step(s, prm);
    const double expected = 0.1 * std::cosh(prm.tau * std::sqrt(prm.g / prm.H));
    CHECK(out.c == Catch::Approx(expected).margin(1e-12));
    CHECK(out.c == Catch::Approx(0.15320).margin(5e-5));
    CHECK(out.dc == Catch::Approx(0.1 * prm.rho() * std::sinh(prm.xi())).margin(1e-12));
}

TEST_CASE("pendulum step conserves orbital energy") {
    const AlipParams prm;
    Rng rng(31);
    for (int k = 0; k < 100000; ++k) {
        const AlipAxisState s{rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0),
                              rng.uniform(-1.0, 1.0)};
        const double tau = rng.uniform(0.05, 0.6);
        const AlipAxisState out = alip_step(s, prm, tau);
        CHECK(orbital_energy(out, prm) == Catch::Approx(orbital_energy(s, prm)).margin(1e-9));
    }
}

TEST_CASE("pendulum step is linear in the state") {
    const AlipParams prm;
    Rng rng(32);
    for (int k = 0; k < 2000; ++k) {
        const AlipAxisState a{rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0), 0.0};
        const AlipAxisState b{rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0), 0.0};
        const double w = rng.uniform(-3.0, 3.0);
        const AlipAxisState sum{a.c + w * b.c, a.dc + w * b.dc, 0.0};
        const AlipAxisState oa = alip_step(a, prm);
        const AlipAxisState ob = alip_step(b, prm);
        const AlipAxisState os = alip_step(sum, prm);
        CHECK(os.c == Catch::Approx(oa.c + w * ob.c).margin(1e-12));
        CHECK(os.dc == Catch::Approx(oa.dc + w * ob.dc).margin(1e-12));
    }
}

TEST_CASE("within-step trajectory matches the step endpoints") {
    const AlipParams prm;
    const AlipAxisState s{0.2, -0.3, 0.05};
    CHECK(alip_com_at(s, prm, 0.0) == Catch::Approx(s.c).margin(1e-12));
    CHECK(alip_com_at(s, prm, prm.tau) == Catch::Approx(alip_step(s, prm).c).margin(1e-12));
}

TEST_CASE("foot placement makes the step average velocity exact") {
    const AlipParams prm;
    Rng rng(33);
    for (int k = 0; k < 5000; ++k) {
        AlipAxisState s{rng.uniform(-0.5, 0.5), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5)};
        const double v_des = rng.uniform(-1.0, 1.0);
        const double tau = rng.uniform(0.1, 0.5);
        s.p = alip_foot_placement(s, prm, v_des, tau);
        const AlipAxisState out = alip_step(s, prm, tau);
        CHECK((out.c - s.c) / tau == Catch::Approx(v_des).margin(1e-9));
    }
}

TEST_CASE("zero command holds a resting biped still") {
    const AlipParams prm;
    AlipState s;
    s.x = {1.0, 0.0, 1.0};
    s.y = {2.0, 0.0, 2.0};
    s.theta = 0.3;
    const AlipExecuteResult out = alip_execute(s, {}, prm);
    CHECK(out.state.x.c == Catch::Approx(1.0).margin(1e-9));
    CHECK(out.state.y.c == Catch::Approx(2.0).margin(1e-9));
    CHECK(out.state.x.dc == Catch::Approx(0.0).margin(1e-9));
    CHECK(out.state.theta == Catch::Approx(0.3));
    CHECK_FALSE(out.command_clamped);
}

TEST_CASE("constant forward command walks at the commanded speed") {
    const AlipParams prm;
    AlipState s;
    const Command cmd{0.5, 0.0, 0.0};
    double prev_x = s.x.c;
    for (int step = 0; step < 20; ++step) {
        s = alip_execute(s, cmd, prm).state;
        CHECK(s.x.c - prev_x == Catch::Approx(0.5 * prm.tau).margin(1e-9));
        CHECK(s.y.c == Catch::Approx(0.0).margin(1e-9));
        prev_x = s.x.c;
    }
}

TEST_CASE("lateral commands rotate with the heading") {
    const AlipParams prm;
    AlipState s;
    s.theta = M_PI / 2.0;
    // Body-frame forward at a 90 degree heading moves the world y axis.
    const AlipExecuteResult out = alip_execute(s, {0.5, 0.0, 0.0}, prm);
    CHECK(out.state.x.c == Catch::Approx(0.0).margin(1e-9));
    CHECK(out.state.y.c == Catch::Approx(0.5 * prm.tau).margin(1e-9));
}

TEST_CASE("yaw-only command advances the heading and flags clamping") {
    const AlipParams prm;
    AlipState s;
    const AlipExecuteResult out = alip_execute(s, {0.0, 0.0, 0.5}, prm);
    CHECK(out.state.theta == Catch::Approx(0.5 * prm.tau).margin(1e-12));
    CHECK(out.state.x.c == Catch::Approx(0.0).margin(1e-9));

    const CommandLimits lim;
    const AlipExecuteResult clamped = alip_execute(s, {2.0, 0.0, 0.0}, prm, lim);
    CHECK(clamped.command_clamped);
    CHECK(clamped.state.x.c == Catch::Approx(1.0 * prm.tau).margin(1e-9));
}

TEST_CASE("omni integration follows straight lines and arcs") {
    Pose p{0.0, 0.0, 0.0};
    for (int k = 0; k < 100; ++k) p = omni_integrate(p, {1.0, 0.0, 0.0}, 0.01);
    CHECK(p.x == Catch::Approx(1.0).margin(1e-9));
    CHECK(p.y == Catch::Approx(0.0).margin(1e-12));

    // Constant (v, omega) traces a circle of radius v / omega.
    const double v = 0.8, w = 0.5, T = 2.0;
    Pose q{0.0, 0.0, 0.0};
    const int steps = 2000;
    for (int k = 0; k < steps; ++k) q = omni_integrate(q, {v, 0.0, w}, T / steps);
    CHECK(q.theta == Catch::Approx(w * T).margin(1e-9));
    CHECK(q.x == Catch::Approx(v / w * std::sin(w * T)).margin(1e-8));
    CHECK(q.y == Catch::Approx(v / w * (1.0 - std::cos(w * T))).margin(1e-8));
}

TEST_CASE("disturbance injection offsets and rewraps the pose") {
    const Pose out = inject_disturbance({1.0, 2.0, M_PI - 0.1}, {0.5, -0.25, 0.2});
    CHECK(out.x == 1.5);
    CHECK(out.y == 1.75);
    CHECK(out.theta == Catch::Approx(-M_PI + 0.1).margin(1e-12));
}

TEST_CASE("pendulum parameter validation") {
    AlipParams prm;
    CHECK_NOTHROW(prm.validate());
    CHECK(prm.rho() == Catch::Approx(std::sqrt(9.81 / 0.9)));
    prm.H = 0.0;
    CHECK_THROWS_AS(prm.validate(), std::domain_error);
}
