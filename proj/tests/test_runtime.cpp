#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <thread>

#include "omniplan/runtime.hpp"
#include "omniplan/udp_protocol.hpp"

using namespace omniplan;

namespace {

PathSnapshot line_snapshot(std::uint64_t epoch = 1) {
    PathSnapshot snap;
    snap.wayposes = {{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, {4.0, 0.0, 0.0}, {6.0, 0.0, 0.0}};
    snap.active_index = 1;
    snap.epoch = epoch;
    snap.goal = {6.0, 0.0};
    return snap;
}

}  // namespace

TEST_CASE("snapshot cell publish, read, and clear") {
    SnapshotCell cell;
    CHECK(cell.read() == nullptr);
    cell.publish(line_snapshot(3));
    const auto snap = cell.read();
    REQUIRE(snap != nullptr);
    CHECK(snap->epoch == 3);
    CHECK(snap->wayposes.size() == 4);
    cell.clear();
    CHECK(cell.read() == nullptr);
    // The old shared handle stays valid after the clear.
    CHECK(snap->wayposes.size() == 4);
}

TEST_CASE("active way-pose advancement is epoch checked and monotonic") {
    SnapshotCell cell;
    CHECK_FALSE(cell.advance_active(1, 2));  // nothing published yet
    cell.publish(line_snapshot(5));
    CHECK_FALSE(cell.advance_active(4, 2));  // stale epoch
    CHECK_FALSE(cell.advance_active(5, 1));  // not an advance
    CHECK_FALSE(cell.advance_active(5, 0));
    CHECK_FALSE(cell.advance_active(5, 4));  // past the end
    CHECK(cell.advance_active(5, 2));
    CHECK(cell.read()->active_index == 2);
    CHECK_FALSE(cell.advance_active(5, 2));  // no going back or repeating
    CHECK(cell.advance_active(5, 3));
    CHECK(cell.read()->active_index == 3);
}

TEST_CASE("snapshot cell readers always see internally consistent plans") {
    SnapshotCell cell;
    std::atomic<bool> stop{false};
    std::atomic<int> violations{0};

    auto reader = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const auto snap = cell.read();
            if (!snap) continue;
            // Every way-pose of a published snapshot carries its epoch as x;
            // a torn read would mix values.
            for (const Pose& wp : snap->wayposes) {
                if (wp.x != static_cast<double>(snap->epoch)) violations.fetch_add(1);
            }
            if (!snap->wayposes.empty() && snap->active_index >= snap->wayposes.size()) {
                violations.fetch_add(1);
            }
        }
    };
    std::thread r1(reader), r2(reader);
    for (std::uint64_t e = 1; e <= 10000; ++e) {
        PathSnapshot snap;
        snap.epoch = e;
        snap.wayposes.assign(2 + e % 5, Pose{static_cast<double>(e), 0.0, 0.0});
        snap.active_index = e % snap.wayposes.size();
        cell.publish(std::move(snap));
        cell.advance_active(e, 1 + e % 3);
    }
    stop.store(true);
    r1.join();
    r2.join();
    CHECK(violations.load() == 0);
}

TEST_CASE("reactive tick steers at the active way-pose") {
    const ClfParams clf;
    const CommandLimits limits;
    const PathSnapshot snap = line_snapshot();
    const Pose pose{0.5, 0.1, 0.0};
    const ReactiveOutput out = reactive_tick(pose, snap, clf, limits, 0.4);
    CHECK_FALSE(out.awaiting_plan);
    CHECK_FALSE(out.advance_to.has_value());
    const Command expected =
        clamp_command(clf_commands(to_egopolar(pose, {2.0, 0.0}), clf), limits);
    CHECK(out.command.v_x == expected.v_x);
    CHECK(out.command.v_y == expected.v_y);
    CHECK(out.command.omega == expected.omega);

    // Pure function: identical inputs, identical outputs.
    const ReactiveOutput again = reactive_tick(pose, snap, clf, limits, 0.4);
    CHECK(again.command.v_x == out.command.v_x);
    CHECK(again.command.omega == out.command.omega);
}

TEST_CASE("reactive tick advances past reached way-poses") {
    const ClfParams clf;
    const CommandLimits limits;
    const PathSnapshot snap = line_snapshot();

    const ReactiveOutput one = reactive_tick({1.8, 0.0, 0.0}, snap, clf, limits, 0.4);
    REQUIRE(one.advance_to.has_value());
    CHECK(*one.advance_to == 2);

    // Standing on top of several way-poses skips all of them at once.
    PathSnapshot tight = snap;
    tight.wayposes = {{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, {2.1, 0.0, 0.0}, {6.0, 0.0, 0.0}};
    const ReactiveOutput multi = reactive_tick({2.0, 0.0, 0.0}, tight, clf, limits, 0.4);
    REQUIRE(multi.advance_to.has_value());
    CHECK(*multi.advance_to == 3);

    // The final way-pose is never abandoned.
    const ReactiveOutput last = reactive_tick({5.9, 0.0, 0.0}, snap, clf, limits, 0.4);
    CHECK_FALSE(last.advance_to.has_value());

    const ReactiveOutput empty = reactive_tick({0.0, 0.0, 0.0}, PathSnapshot{}, clf, limits, 0.4);
    CHECK(empty.awaiting_plan);
    CHECK(empty.command.v_x == 0.0);
}

TEST_CASE("command datagrams have a fixed little-endian layout") {
    const auto buf = udp_encode_command({1.0, 0.0, 0.0}, 7);
    REQUIRE(buf.size() == kCommandDatagramSize);
    CHECK(kCommandDatagramSize == 32);
    const std::uint8_t expected[32] = {
        0x43, 0x4C, 0x46, 0x31,                          // magic "CLF1"
        0x07, 0x00, 0x00, 0x00,                          // sequence 7
        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xF0, 0x3F,  // 1.0
        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,  // 0.0
        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,  // 0.0
    };
    for (std::size_t i = 0; i < 32; ++i) CHECK(buf[i] == expected[i]);
}

TEST_CASE("datagram round trips and rejection of malformed input") {
    Rng rng(71);
    for (int k = 0; k < 10000; ++k) {
        const Command cmd{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const auto seq = static_cast<std::uint32_t>(rng.bits());
        const auto buf = udp_encode_command(cmd, seq);
        const auto back = udp_decode_command(buf.data(), buf.size());
        REQUIRE(back.has_value());
        CHECK(back->seq == seq);
        CHECK(back->command.v_x == cmd.v_x);
        CHECK(back->command.v_y == cmd.v_y);
        CHECK(back->command.omega == cmd.omega);

        const Pose pose{rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0),
                        rng.uniform(-M_PI, M_PI)};
        const double ts = rng.uniform(0.0, 1e6);
        const auto pbuf = udp_encode_pose(pose, ts, seq);
        const auto pback = udp_decode_pose(pbuf.data(), pbuf.size());
        REQUIRE(pback.has_value());
        CHECK(pback->pose.x == pose.x);
        CHECK(pback->pose.theta == pose.theta);
        CHECK(pback->timestamp == ts);
    }

    auto buf = udp_encode_command({0.1, 0.2, 0.3}, 9);
    CHECK_FALSE(udp_decode_command(buf.data(), 20).has_value());           // truncated
    CHECK_FALSE(udp_decode_command(buf.data(), buf.size() - 1).has_value());
    CHECK_FALSE(udp_decode_pose(buf.data(), buf.size()).has_value());      // wrong length
    buf[0] = 0x58;
    CHECK_FALSE(udp_decode_command(buf.data(), buf.size()).has_value());   // bad magic
}

TEST_CASE("sequence gate drops stale and duplicate packets") {
    SequenceGate gate;
    CHECK(gate.accept(5));
    CHECK_FALSE(gate.accept(5));
    CHECK_FALSE(gate.accept(3));
    CHECK(gate.accept(6));
    CHECK(gate.accept(100));
    CHECK_FALSE(gate.accept(99));
    SequenceGate fresh;
    CHECK(fresh.accept(0));  // the first packet always passes
    CHECK_FALSE(fresh.accept(0));
}

TEST_CASE("obstacle distance field matches a brute-force oracle") {
    Rng rng(72);
    for (int trial = 0; trial < 3; ++trial) {
        LayeredGridMap map(0.5, 0.0, 0.0, 30, 22);
        map.add_layer("obstacle", 0.0);
        for (int k = 0; k < 25; ++k) {
            map.set("obstacle",
                    {static_cast<int>(rng.uniform_index(30)),
                     static_cast<int>(rng.uniform_index(22))},
                    1.0);
        }
        const auto field = detail::obstacle_distance_field(map);
        REQUIRE(field.size() == 30u * 22u);
        for (int iy = 0; iy < 22; ++iy) {
            for (int ix = 0; ix < 30; ++ix) {
                double best = 1e18;
                for (int jy = 0; jy < 22; ++jy) {
                    for (int jx = 0; jx < 30; ++jx) {
                        if (map.at("obstacle", {jx, jy}) == 0.0) continue;
                        best = std::min(best, std::hypot((ix - jx) * 0.5, (iy - jy) * 0.5));
                    }
                }
                CHECK(field[map.index({ix, iy})] == Catch::Approx(best).margin(1e-9));
            }
        }
    }

    LayeredGridMap clear(0.5, 0.0, 0.0, 5, 5);
    clear.add_layer("obstacle", 0.0);
    CHECK(detail::obstacle_distance_field(clear).empty());
}

TEST_CASE("flat preset run reaches the goal on a near-straight path") {
    const auto cfg = scenario_preset("flat");
    REQUIRE(cfg.has_value());
    const RunResult res = run_scenario(*cfg);
    CHECK(res.report.status == RunStatus::GoalReached);
    CHECK(res.exit_code() == 0);
    CHECK(res.report.path_length <= 11.0);  // straight-line distance is 10 m
    CHECK(res.report.goal_distance < cfg->mission.goal_tolerance);
    CHECK(res.report.replan_count > 0);
    REQUIRE_FALSE(res.trajectory.empty());
    CHECK(res.trajectory.front().x == cfg->start.x);
    const std::string json = res.report.to_json();
    CHECK(json.find("\"status\":\"goal_reached\"") != std::string::npos);
    CHECK(json.find("\"discontinuities\":[") != std::string::npos);
}

TEST_CASE("runs are byte-for-byte deterministic") {
    const auto cfg = scenario_preset("flat");
    REQUIRE(cfg.has_value());
    const RunResult a = run_scenario(*cfg);
    const RunResult b = run_scenario(*cfg);
    CHECK(a.report.to_json() == b.report.to_json());
    CHECK(trajectory_to_csv(a.trajectory) == trajectory_to_csv(b.trajectory));
    CHECK(a.events == b.events);
}

TEST_CASE("degenerate single-rate configuration still converges") {
    auto cfg = *scenario_preset("flat");
    cfg.rates.planning_hz = 5.0;
    cfg.rates.reactive_hz = 5.0;
    cfg.rates.sim_dt = 0.2;
    const RunResult res = run_scenario(cfg);
    CHECK(res.report.status == RunStatus::GoalReached);
}

TEST_CASE("a lateral shove is recovered and exempt from discontinuity counting") {
    auto cfg = *scenario_preset("flat");
    cfg.disturbances = {{5.0, 0.0, 0.5, 0.0}};
    const RunResult res = run_scenario(cfg);
    CHECK(res.report.status == RunStatus::GoalReached);
    CHECK(res.report.disturbances_applied == 1);
    // The shove itself is exempt; anything recorded must come from later replans.
    for (const auto& d : res.report.discontinuities) CHECK(d.t > 5.5);
}

TEST_CASE("biped plant runs the flat preset to the goal") {
    auto cfg = *scenario_preset("flat");
    cfg.robot = RobotModel::Alip;
    const RunResult res = run_scenario(cfg);
    CHECK(res.report.status == RunStatus::GoalReached);
    REQUIRE_FALSE(res.trajectory.empty());
    CHECK(res.trajectory.back().step_index > 10);
    const std::string csv = trajectory_to_csv(res.trajectory);
    CHECK(csv.rfind("sim_time,x,y,theta,v_x,v_y,omega,step_index\n", 0) == 0);
}
