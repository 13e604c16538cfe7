#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "slamkit/pose.hpp"
#include "slamkit/random.hpp"
#include "slamkit/trajectory.hpp"

using namespace slamkit;

namespace {
Pose2 random_pose(Rng& rng) {
    return Pose2(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0),
                 rng.uniform(-kPi, kPi));
}
}  // namespace

TEST_CASE("compose basics") {
    const Pose2 r1 = compose(Pose2(), Pose2(1.0, 2.0, 0.3));
    CHECK(r1.x == doctest::Approx(1.0));
    CHECK(r1.y == doctest::Approx(2.0));
    CHECK(r1.yaw == doctest::Approx(0.3));

    const Pose2 r2 = compose(Pose2(1.0, 0.0, 0.0), Pose2(0.0, 1.0, 0.0));
    CHECK(r2.x == doctest::Approx(1.0));
    CHECK(r2.y == doctest::Approx(1.0));
    CHECK(r2.yaw == doctest::Approx(0.0));

    // quarter turn maps +x onto +y
    const Pose2 r3 = compose(Pose2(0.0, 0.0, kPi / 2.0), Pose2(1.0, 0.0, 0.0));
    CHECK(r3.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r3.y == doctest::Approx(1.0));
    CHECK(r3.yaw == doctest::Approx(kPi / 2.0));
}

TEST_CASE("inverse basics") {
    const Pose2 i1 = inverse(Pose2());
    CHECK(i1.x == doctest::Approx(0.0));
    CHECK(i1.y == doctest::Approx(0.0));
    CHECK(i1.yaw == doctest::Approx(0.0));

    const Pose2 i2 = inverse(Pose2(1.0, 0.0, 0.0));
    CHECK(i2.x == doctest::Approx(-1.0));
    CHECK(i2.y == doctest::Approx(0.0));

    const Pose2 i3 = inverse(Pose2(0.0, 0.0, kPi / 2.0));
    CHECK(i3.yaw == doctest::Approx(-kPi / 2.0));
}

TEST_CASE("inverse is a two-sided inverse under compose") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const Pose2 a = random_pose(rng);
        const Pose2 left = compose(a, inverse(a));
        const Pose2 right = compose(inverse(a), a);
        for (const Pose2& p : {left, right}) {
            CHECK(std::abs(p.x) < 1e-12);
            CHECK(std::abs(p.y) < 1e-12);
            CHECK(std::abs(p.yaw) < 1e-12);
        }
    }
}

TEST_CASE("compose is associative") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Pose2 a = random_pose(rng);
        const Pose2 b = random_pose(rng);
        const Pose2 c = random_pose(rng);
        const Pose2 left = compose(compose(a, b), c);
        const Pose2 right = compose(a, compose(b, c));
        CHECK(left.x == doctest::Approx(right.x).epsilon(1e-9));
        CHECK(left.y == doctest::Approx(right.y).epsilon(1e-9));
        CHECK(std::abs(angular_diff(left.yaw, right.yaw)) < 1e-9);
    }
}

TEST_CASE("between recovers the relative pose") {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        const Pose2 a = random_pose(rng);
        const Pose2 d = random_pose(rng);
        const Pose2 b = compose(a, d);
        const Pose2 rel = between(a, b);
        CHECK(rel.x == doctest::Approx(d.x).epsilon(1e-9));
        CHECK(rel.y == doctest::Approx(d.y).epsilon(1e-9));
        CHECK(std::abs(angular_diff(rel.yaw, d.yaw)) < 1e-9);
    }
}

TEST_CASE("normalize_angle") {
    CHECK(normalize_angle(0.0) == doctest::Approx(0.0));
    CHECK(normalize_angle(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
    // boundary maps into the half-open interval
    CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
    CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
    CHECK_THROWS_AS(normalize_angle(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(normalize_angle(std::nan("")), std::invalid_argument);
}

TEST_CASE("normalize_angle is idempotent and congruent mod 2pi") {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const double theta = rng.uniform(-50.0, 50.0);
        const double n = normalize_angle(theta);
        CHECK(n > -kPi);
        CHECK(n <= kPi);
        CHECK(normalize_angle(n) == doctest::Approx(n));
        CHECK(std::remainder(n - theta, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("angular_diff") {
    CHECK(angular_diff(0.1, 0.1) == doctest::Approx(0.0));
    // wrap across the +-pi seam
    CHECK(angular_diff(kPi - 0.1, -kPi + 0.1) == doctest::Approx(-0.2));
    CHECK(angular_diff(kPi / 2.0, 0.0) == doctest::Approx(kPi / 2.0));
}

TEST_CASE("angular_diff antisymmetry away from the boundary") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const double a = rng.uniform(-kPi, kPi);
        const double b = rng.uniform(-kPi, kPi);
        const double d = angular_diff(a, b);
        CHECK(std::abs(d) <= kPi);
        if (std::abs(std::abs(d) - kPi) > 1e-9) {
            CHECK(angular_diff(b, a) == doctest::Approx(-d).epsilon(1e-12));
        }
    }
}

TEST_CASE("pose3 normalizes all angles") {
    const Pose3 p(1.0, 2.0, 3.0, 3.0 * kPi, -5.0 * kPi / 2.0, 2.0 * kPi);
    CHECK(p.roll == doctest::Approx(kPi));
    CHECK(p.pitch == doctest::Approx(-kPi / 2.0));
    CHECK(p.yaw == doctest::Approx(0.0));
    const Pose2 planar = p.planar();
    CHECK(planar.x == doctest::Approx(1.0));
    CHECK(planar.y == doctest::Approx(2.0));
}

TEST_CASE("trajectory timestamps must strictly increase") {
    Trajectory2 t;
    t.append(0.0, Pose2());
    t.append(0.1, Pose2(1.0, 0.0, 0.0));
    CHECK_THROWS_AS(t.append(0.1, Pose2()), std::invalid_argument);
    CHECK_THROWS_AS(t.append(0.05, Pose2()), std::invalid_argument);
    CHECK(t.size() == 2);
}
