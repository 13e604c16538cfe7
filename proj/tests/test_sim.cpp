#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slamkit/simulator.hpp"

using namespace slamkit;

TEST_CASE("ray_cast in the square room") {
    const World room = make_lab_world();
    const RayHit straight = ray_cast(room, {0.0, 0.0}, 0.0, 0.15, 12.0);
    CHECK(straight.status == RayHit::Status::hit);
    CHECK(straight.range == doctest::Approx(3.0));

    const RayHit diagonal = ray_cast(room, {0.0, 0.0}, kPi / 4.0, 0.15, 12.0);
    CHECK(diagonal.status == RayHit::Status::hit);
    CHECK(diagonal.range == doctest::Approx(3.0 * std::sqrt(2.0)));

    // wall below the sensor minimum
    const RayHit close = ray_cast(room, {2.90, 0.0}, 0.0, 0.15, 12.0);
    CHECK(close.status == RayHit::Status::too_close);
    CHECK(close.range == doctest::Approx(0.10));

    // nothing within reach
    World far_wall{"far", {{{100.0, -1.0}, {100.0, 1.0}},
                           {{101.0, -1.0}, {101.0, 1.0}},
                           {{102.0, -1.0}, {102.0, 1.0}}}};
    CHECK(ray_cast(far_wall, {0.0, 0.0}, 0.0, 0.15, 12.0).status == RayHit::Status::no_hit);
}

TEST_CASE("generate_scan geometry and symmetry") {
    const World room = make_lab_world();
    LidarParams lp;
    lp.sigma = 0.0;
    Rng rng(1);
    const LaserScan scan = generate_scan(room, Pose2(), lp, rng);
    REQUIRE(scan.beam_count() == 360);
    CHECK(scan.valid[0]);
    CHECK(scan.ranges[0] == doctest::Approx(3.0));
    CHECK(scan.ranges[90] == doctest::Approx(3.0));
    CHECK(scan.ranges[45] == doctest::Approx(3.0 * std::sqrt(2.0)));
    CHECK(std::lround(2.0 * kPi / scan.angle_increment) == 360);

    // rotating the pose by 90 degrees permutes the beams by 90 slots
    Rng rng2(1);
    const LaserScan rotated = generate_scan(room, Pose2(0.0, 0.0, kPi / 2.0), lp, rng2);
    for (int i = 0; i < 360; ++i) {
        CHECK(rotated.ranges[i] == doctest::Approx(scan.ranges[(i + 90) % 360]).epsilon(1e-9));
    }
}

TEST_CASE("generate_scan noise is deterministic per seed") {
    const World room = make_lab_world();
    LidarParams lp;
    lp.sigma = 0.02;
    Rng a(12345);
    Rng b(12345);
    Rng c(54321);
    const LaserScan sa = generate_scan(room, Pose2(0.3, -0.2, 0.1), lp, a);
    const LaserScan sb = generate_scan(room, Pose2(0.3, -0.2, 0.1), lp, b);
    const LaserScan sc = generate_scan(room, Pose2(0.3, -0.2, 0.1), lp, c);
    CHECK(sa.ranges == sb.ranges);  // bit identical
    CHECK(sa.ranges != sc.ranges);
    for (std::size_t i = 0; i < sa.beam_count(); ++i) {
        if (sa.valid[i]) {
            CHECK(sa.ranges[i] >= lp.range_min);
            CHECK(sa.ranges[i] <= lp.range_max);
        }
    }
}

TEST_CASE("a pose on a wall yields a degenerate scan") {
    const World room = make_lab_world();
    LidarParams lp;
    Rng rng(1);
    const LaserScan scan = generate_scan(room, Pose2(3.0, 0.0, 0.0), lp, rng);
    CHECK(scan.degenerate());
    CHECK(scan.valid_count() == 0);
}

TEST_CASE("rectangle trajectory") {
    const Trajectory2 t = rectangle_trajectory(1.0);
    CHECK(t.samples.front().t == doctest::Approx(0.0));
    CHECK(t.samples.front().pose.x == doctest::Approx(0.0));
    CHECK(t.samples.front().pose.y == doctest::Approx(0.0));
    CHECK(t.end_time() == doctest::Approx(12.0));  // perimeter 12 m at 1 m/s
    CHECK(t.samples.back().pose.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(t.samples.back().pose.y == doctest::Approx(0.0).epsilon(1e-9));
    for (const auto& s : t.samples) {
        CHECK(s.pose.yaw == doctest::Approx(0.0));  // heading fixed forward
    }
    CHECK_THROWS_AS(rectangle_trajectory(0.0), std::invalid_argument);
}

TEST_CASE("figure-8 trajectory closes and aligns yaw with velocity") {
    const Trajectory2 t = figure8_trajectory(1.0);
    CHECK(t.samples.front().pose.x == doctest::Approx(0.0));
    CHECK(t.samples.front().pose.y == doctest::Approx(0.0));
    CHECK(norm({t.samples.back().pose.x, t.samples.back().pose.y}) < 1e-9);
    CHECK(t.end_time() == doctest::Approx(4.0 * kPi * 1.25));

    // yaw equals the finite-difference velocity direction
    int checked = 0;
    for (std::size_t i = 1; i + 1 < t.samples.size(); i += 50) {
        const auto& prev = t.samples[i - 1];
        const auto& next = t.samples[i + 1];
        const double vx = next.pose.x - prev.pose.x;
        const double vy = next.pose.y - prev.pose.y;
        if (std::hypot(vx, vy) < 1e-9) {
            continue;
        }
        const double fd_yaw = std::atan2(vy, vx);
        CHECK(std::abs(angular_diff(t.samples[i].pose.yaw, fd_yaw)) < 1e-3);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("trajectory sampling runs at 240 Hz") {
    const Trajectory2 t = rectangle_trajectory(1.0);
    for (std::size_t i = 1; i < 100; ++i) {
        CHECK(t.samples[i].t - t.samples[i - 1].t == doctest::Approx(1.0 / 240.0));
    }
    CHECK(t.size() == 12 * 240 + 1);
}

TEST_CASE("altimeter model") {
    AltimeterParams ap;
    ap.sigma = 0.0;
    Rng rng(1);

    const AltSample level = sample_altimeter(1.08, 0.0, 0.0, ap, rng);
    CHECK(level.valid);
    CHECK_FALSE(level.saturated);
    CHECK(level.range == doctest::Approx(1.00));

    // below the sensor minimum clamps and saturates
    const AltSample low = sample_altimeter(0.20, 0.0, 0.0, ap, rng);
    CHECK(low.valid);
    CHECK(low.saturated);
    CHECK(low.range == doctest::Approx(0.30));

    // 60 degree roll doubles the slant range
    const AltSample tilted = sample_altimeter(1.08, deg_to_rad(60.0), 0.0, ap, rng);
    CHECK(tilted.valid);
    CHECK(tilted.range == doctest::Approx(2.00));

    // beyond maximum range: invalid
    const AltSample high = sample_altimeter(13.5, 0.0, 0.0, ap, rng);
    CHECK_FALSE(high.valid);
}

TEST_CASE("scan gating on tilt") {
    LaserScan scan;
    const double threshold = deg_to_rad(10.0);
    ImuSample level{0.0, 0.0, 0.0, 0.0};
    CHECK(gate_scan(scan, &level, threshold) == GateDecision::keep);

    ImuSample rolled{0.0, deg_to_rad(15.0), 0.0, 0.0};
    CHECK(gate_scan(scan, &rolled, threshold) == GateDecision::drop);

    // exactly at the threshold keeps (strict inequality)
    ImuSample boundary{0.0, threshold, 0.0, 0.0};
    CHECK(gate_scan(scan, &boundary, threshold) == GateDecision::keep);

    ImuSample pitched{0.0, 0.0, -deg_to_rad(11.0), 0.0};
    CHECK(gate_scan(scan, &pitched, threshold) == GateDecision::drop);

    CHECK(gate_scan(scan, nullptr, threshold) == GateDecision::keep_no_imu);
}

TEST_CASE("scenario record structure and rates") {
    ScenarioConfig sc;
    sc.scenario = "rect_nominal";
    sc.sigma = 0.0;
    const ScenarioRecord rec = simulate_scenario(sc, make_lab_world());

    CHECK(rec.ground_truth.size() == 2881);
    CHECK(rec.scans.size() == 121);
    for (std::size_t i = 1; i < rec.scans.size(); ++i) {
        CHECK(rec.scans[i].timestamp - rec.scans[i - 1].timestamp ==
              doctest::Approx(0.1).epsilon(1e-9));
    }
    for (std::size_t i = 1; i < 50; ++i) {
        CHECK(rec.ground_truth.samples[i].t - rec.ground_truth.samples[i - 1].t ==
              doctest::Approx(1.0 / 240.0));
    }
    for (const auto& s : rec.ground_truth.samples) {
        CHECK(s.pose.z > 0.5);
        CHECK(s.pose.z < 1.5);
    }
}

TEST_CASE("scenario records are bit-exact per seed") {
    ScenarioConfig sc;
    sc.scenario = "fig8_nominal";
    sc.seed = 17;
    const ScenarioRecord a = simulate_scenario(sc, make_lab_world());
    const ScenarioRecord b = simulate_scenario(sc, make_lab_world());
    REQUIRE(a.scans.size() == b.scans.size());
    for (std::size_t i = 0; i < a.scans.size(); ++i) {
        CHECK(a.scans[i].ranges == b.scans[i].ranges);
    }
    REQUIRE(a.alt.size() == b.alt.size());
    for (std::size_t i = 0; i < a.alt.size(); ++i) {
        CHECK(a.alt[i].range == b.alt[i].range);
    }

    sc.seed = 18;
    const ScenarioRecord c = simulate_scenario(sc, make_lab_world());
    bool any_diff = false;
    for (std::size_t i = 0; i < a.scans.size() && !any_diff; ++i) {
        any_diff = a.scans[i].ranges != c.scans[i].ranges;
    }
    CHECK(any_diff);
}

TEST_CASE("fast scenarios halve the duration and scan count") {
    ScenarioConfig nominal;
    nominal.scenario = "fig8_nominal";
    ScenarioConfig fast;
    fast.scenario = "fig8_fast";
    const ScenarioRecord rn = simulate_scenario(nominal, make_lab_world());
    const ScenarioRecord rf = simulate_scenario(fast, make_lab_world());
    CHECK(rf.ground_truth.end_time() == doctest::Approx(rn.ground_truth.end_time() / 2.0)
                                            .epsilon(1e-3));
    CHECK(std::abs(static_cast<long>(rn.scans.size()) - 2 * static_cast<long>(rf.scans.size()))
          <= 2);
}

TEST_CASE("truth gaps freeze the recorded stream only") {
    ScenarioConfig sc;
    sc.scenario = "rect_nominal";
    sc.sigma = 0.0;
    sc.truth_gaps = {{2.0, 3.0}};
    const ScenarioRecord rec = simulate_scenario(sc, make_lab_world());

    const auto& ts = rec.ground_truth.samples;
    const std::size_t i0 = static_cast<std::size_t>(2.1 * 240.0);
    const std::size_t i1 = static_cast<std::size_t>(2.5 * 240.0);
    CHECK(ts[i0].pose.x == ts[i1].pose.x);
    CHECK(ts[i0].pose.y == ts[i1].pose.y);
    // and resumes moving afterwards
    const std::size_t i2 = static_cast<std::size_t>(3.5 * 240.0);
    CHECK(ts[i2].pose.x != ts[i1].pose.x);
}

TEST_CASE("tunnel world is a closed 30 x 6 corridor") {
    const World tunnel = make_tunnel_world();
    CHECK(tunnel.segments.size() == 4);
    const RayHit side = ray_cast(tunnel, {0.0, 0.0}, kPi / 2.0, 0.15, 12.0);
    CHECK(side.range == doctest::Approx(3.0));
    // end caps beyond lidar reach from the center
    CHECK(ray_cast(tunnel, {0.0, 0.0}, 0.0, 0.15, 12.0).status == RayHit::Status::no_hit);
}

TEST_CASE("unknown scenario name is rejected") {
    ScenarioConfig sc;
    sc.scenario = "zigzag";
    CHECK_THROWS_AS(simulate_scenario(sc, make_lab_world()), std::invalid_argument);
}
