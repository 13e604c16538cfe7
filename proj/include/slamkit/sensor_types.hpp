// Sensor sample types shared by the simulator and the SLAM pipelines.

#ifndef SLAMKIT_SENSOR_TYPES_HPP
#define SLAMKIT_SENSOR_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "slamkit/pose.hpp"

namespace slamkit {

/// One 360-degree range sweep. Beam i points along
/// angle_min + i * angle_increment in the sensor frame.
struct LaserScan {
    double timestamp = 0.0;
    double angle_min = 0.0;
    double angle_increment = 0.0;
    double range_min = 0.0;
    double range_max = 0.0;
    std::vector<double> ranges;
    std::vector<bool> valid;

    std::size_t beam_count() const { return ranges.size(); }

    double beam_angle(std::size_t i) const {
        return angle_min + static_cast<double>(i) * angle_increment;
    }

    /// Beam endpoint in the sensor frame.
    Vec2 beam_point(std::size_t i) const {
        const double a = beam_angle(i);
        return {ranges[i] * std::cos(a), ranges[i] * std::sin(a)};
    }

    std::size_t valid_count() const {
        std::size_t n = 0;
        for (bool v : valid) {
            if (v) ++n;
        }
        return n;
    }

    bool degenerate() const { return valid_count() == 0; }
};

struct ImuSample {
    double timestamp = 0.0;
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
};

/// 1D rangefinder sample. A reading clamped at the sensor minimum is still
/// valid but carries the saturated flag.
struct AltSample {
    double timestamp = 0.0;
    double range = 0.0;
    bool valid = false;
    bool saturated = false;
};

}  // namespace slamkit

#endif  // SLAMKIT_SENSOR_TYPES_HPP
