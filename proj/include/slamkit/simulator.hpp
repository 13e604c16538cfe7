// Deterministic synthetic data source: trajectory generators sampled at the
// ground-truth rate, a beam-per-degree lidar model, IMU attitude, and a 1D
// altimeter with a minimum-range blind zone.

#ifndef SLAMKIT_SIMULATOR_HPP
#define SLAMKIT_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slamkit/pose.hpp"
#include "slamkit/random.hpp"
#include "slamkit/sensor_types.hpp"
#include "slamkit/trajectory.hpp"
#include "slamkit/world.hpp"

namespace slamkit {

struct LidarParams {
    double range_min = 0.15;
    double range_max = 12.0;
    double angle_min = 0.0;
    int beam_count = 360;
    double sigma = 0.02;     // per-beam Gaussian range noise, meters
    double rate_hz = 10.0;

    double angle_increment() const { return 2.0 * kPi / beam_count; }
};

struct AltimeterParams {
    double sensor_offset = 0.08;  // sensor mounted below the vehicle reference
    double range_min = 0.30;
    double range_max = 12.0;
    double sigma = 0.01;
};

/// Cast one lidar beam per angle step. Ranges get zero-mean Gaussian noise
/// from `rng`; beams below minimum range or without a wall in reach are
/// invalid. A pose on top of a wall yields an all-invalid (degenerate) scan.
LaserScan generate_scan(const World& world, const Pose2& pose, const LidarParams& params,
                        Rng& rng, double timestamp = 0.0);

/// Closed rectangular path of the given dimensions, entered at the midpoint
/// of one side so it starts and ends at the origin. Heading stays fixed at 0.
Trajectory2 rectangle_trajectory(double speed, double width = 4.0, double height = 2.0,
                                 double rate_hz = 240.0);

/// Two tangent circles traversed as a figure eight, heading aligned with the
/// instantaneous velocity; starts and ends at the origin.
Trajectory2 figure8_trajectory(double speed, double radius = 1.25, double rate_hz = 240.0);

/// Slant-range altimeter reading for a vehicle at `true_altitude` with the
/// given attitude. Readings below the sensor minimum clamp to it and are
/// flagged saturated; readings beyond the maximum are invalid.
AltSample sample_altimeter(double true_altitude, double roll, double pitch,
                           const AltimeterParams& params, Rng& rng, double timestamp = 0.0);

enum class GateDecision { keep, drop, keep_no_imu };

/// Drop a scan when the platform tilt exceeds the threshold (strict). A
/// missing IMU sample keeps the scan and reports keep_no_imu.
GateDecision gate_scan(const LaserScan& scan, const ImuSample* imu, double threshold);

struct ScenarioConfig {
    std::string scenario = "rect_nominal";  // rect_nominal|rect_fast|fig8_nominal|fig8_fast
    std::string world = "lab";              // lab|tunnel|<path to world json>
    std::uint64_t seed = 1;
    double sigma = 0.02;
    std::vector<std::pair<double, double>> truth_gaps;  // recorded truth repeats its last value

    LidarParams lidar;
    AltimeterParams altimeter;
    double truth_rate_hz = 240.0;
    int imu_every = 6;   // IMU every 6th truth sample (40 Hz)
    int alt_every = 12;  // altimeter every 12th truth sample (20 Hz)

    double base_altitude = 1.0;
    double altitude_amplitude = 0.15;
    double altitude_freq_hz = 0.1;
    double tilt_amplitude = deg_to_rad(2.0);

    double nominal_speed = 1.0;
    double fast_speed = 2.0;

    double rect_width = 4.0;
    double rect_height = 2.0;
    double fig8_radius = 1.25;
};

struct ScenarioRecord {
    std::string scenario;
    std::string world_name;
    std::uint64_t seed = 0;
    double sigma = 0.0;
    Trajectory3 ground_truth;
    std::vector<LaserScan> scans;
    std::vector<ImuSample> imu;
    std::vector<AltSample> alt;
};

ScenarioRecord simulate_scenario(const ScenarioConfig& config, const World& world);
ScenarioRecord simulate_scenario(const ScenarioConfig& config);

/// True while any known scenario name matches.
bool is_known_scenario(const std::string& name);

}  // namespace slamkit

#endif  // SLAMKIT_SIMULATOR_HPP
