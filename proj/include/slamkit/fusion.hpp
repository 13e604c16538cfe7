// Combine the 2D SLAM pose, the 1D altimeter, and IMU attitude into a 6-DoF
// pose. The altimeter sits below the vehicle reference point, so its minimum
// range puts a floor under the fused altitude (the blind zone).

#ifndef SLAMKIT_FUSION_HPP
#define SLAMKIT_FUSION_HPP

#include "slamkit/pose.hpp"
#include "slamkit/sensor_types.hpp"

namespace slamkit {

struct FusionConfig {
    double sensor_offset = 0.08;  // meters below the vehicle reference
    double alt_min = 0.30;
    double alt_max = 12.0;
    bool tilt_compensation = true;
};

/// Lowest and highest fusable altitude: (alt_min + offset, alt_max + offset).
std::pair<double, double> effective_range(const FusionConfig& config);

struct FusedPose {
    Pose3 pose;
    bool blind_zone = false;  // altimeter saturated or z clamped to the floor
    bool stale_altitude = false;  // no valid altimeter sample yet, held value
};

/// Stateless apart from holding the last valid altitude across invalid
/// altimeter samples.
class AltitudeFuser {
public:
    explicit AltitudeFuser(const FusionConfig& config = {}) : config_(config) {}

    FusedPose fuse(const Pose2& pose2, const AltSample& alt, const ImuSample& imu);

    const FusionConfig& config() const { return config_; }

private:
    FusionConfig config_;
    bool have_last_ = false;
    double last_z_ = 0.0;
    bool last_blind_ = false;
};

}  // namespace slamkit

#endif  // SLAMKIT_FUSION_HPP
