// Planar and 3D rigid poses plus the angle arithmetic shared by every module.

#ifndef SLAMKIT_POSE_HPP
#define SLAMKIT_POSE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slamkit {

inline constexpr double kPi = std::numbers::pi;

/// Wrap an angle into (-pi, pi]. Throws on non-finite input.
inline double normalize_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("normalize_angle: non-finite angle");
    }
    double a = std::remainder(theta, 2.0 * kPi);
    if (a <= -kPi) {
        a += 2.0 * kPi;
    }
    return a;
}

/// Shortest signed difference a - b, in (-pi, pi].
inline double angular_diff(double a, double b) {
    return normalize_angle(a - b);
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

/// Planar pose. yaw is kept in (-pi, pi] by every constructor and operation.
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;

    Pose2() = default;
    Pose2(double x_, double y_, double yaw_) : x(x_), y(y_), yaw(normalize_angle(yaw_)) {}

    Vec2 translation() const { return {x, y}; }

    /// Map a point given in this pose's frame into the parent frame.
    Vec2 transform(const Vec2& p) const {
        const double c = std::cos(yaw);
        const double s = std::sin(yaw);
        return {x + c * p.x - s * p.y, y + s * p.x + c * p.y};
    }
};

/// a (+) b: b expressed in a's frame, mapped to the global frame.
inline Pose2 compose(const Pose2& a, const Pose2& b) {
    const double c = std::cos(a.yaw);
    const double s = std::sin(a.yaw);
    return Pose2(a.x + c * b.x - s * b.y,
                 a.y + s * b.x + c * b.y,
                 a.yaw + b.yaw);
}

inline Pose2 inverse(const Pose2& a) {
    const double c = std::cos(a.yaw);
    const double s = std::sin(a.yaw);
    return Pose2(-c * a.x - s * a.y,
                 s * a.x - c * a.y,
                 -a.yaw);
}

/// Relative pose of b in a's frame: a (+) between(a, b) == b.
inline Pose2 between(const Pose2& a, const Pose2& b) {
    return compose(inverse(a), b);
}

/// Spatial pose. Only x, y, z and yaw are observable from the 2D SLAM plus
/// altimeter stack; roll and pitch are pass-through IMU attitude values.
struct Pose3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;

    Pose3() = default;
    Pose3(double x_, double y_, double z_, double roll_, double pitch_, double yaw_)
        : x(x_), y(y_), z(z_),
          roll(normalize_angle(roll_)),
          pitch(normalize_angle(pitch_)),
          yaw(normalize_angle(yaw_)) {}

    Pose2 planar() const { return Pose2(x, y, yaw); }
};

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace slamkit

#endif  // SLAMKIT_POSE_HPP
