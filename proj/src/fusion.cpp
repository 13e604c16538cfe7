#include "slamkit/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace slamkit {

std::pair<double, double> effective_range(const FusionConfig& config) {
    return {config.alt_min + config.sensor_offset, config.alt_max + config.sensor_offset};
}

FusedPose AltitudeFuser::fuse(const Pose2& pose2, const AltSample& alt, const ImuSample& imu) {
    const double floor_z = config_.alt_min + config_.sensor_offset;

    FusedPose out;
    double z;
    bool blind = false;

    if (!alt.valid) {
        if (have_last_) {
            z = last_z_;
            blind = last_blind_;
        } else {
            z = floor_z;
            blind = true;
        }
        out.stale_altitude = true;
    } else if (alt.saturated) {
        z = floor_z;
        blind = true;
    } else {
        const double vertical = config_.tilt_compensation
                                    ? alt.range * std::cos(imu.roll) * std::cos(imu.pitch)
                                    : alt.range;
        z = config_.sensor_offset + vertical;
        if (z < floor_z) {
            z = floor_z;  // tilted short reading still bottoms out at the blind zone
            blind = true;
        }
        last_z_ = z;
        last_blind_ = blind;
        have_last_ = true;
    }

    out.pose = Pose3(pose2.x, pose2.y, z, imu.roll, imu.pitch, pose2.yaw);
    out.blind_zone = blind;
    return out;
}

}  // namespace slamkit
