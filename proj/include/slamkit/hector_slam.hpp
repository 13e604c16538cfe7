// Odometry-free scan-to-map Gauss-Newton matching over a multi-resolution
// grid pyramid. The matcher minimizes sum_i [1 - M(S_i(xi))]^2 over the beam
// endpoints S_i, with M the bilinearly interpolated occupancy probability.

#ifndef SLAMKIT_HECTOR_SLAM_HPP
#define SLAMKIT_HECTOR_SLAM_HPP

#include <vector>

#include <Eigen/Core>

#include "slamkit/map_pyramid.hpp"
#include "slamkit/pose.hpp"
#include "slamkit/sensor_types.hpp"

namespace slamkit {

struct GaussNewtonResult {
    Pose2 delta;           // additive world-frame increment (dx, dy, dyaw)
    double residual = 0.0; // mean of [1 - M(S_i)]^2 at the linearization point
    Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
    bool singular = false;
};

/// One damped Gauss-Newton step of the scan-to-map objective at pose `xi`.
GaussNewtonResult gauss_newton_step(const OccupancyGrid& grid, const LaserScan& scan,
                                    const Pose2& xi, double lambda = 1e-6);

/// Mean of [1 - M(S_i)]^2 over valid beams; out-of-map endpoints read the
/// unknown probability.
double scan_residual(const OccupancyGrid& grid, const LaserScan& scan, const Pose2& xi);

struct HectorConfig {
    double base_resolution = 0.05;
    double map_extent = 24.0;
    int pyramid_levels = 3;

    int max_iterations = 10;          // per pyramid level
    double epsilon_xy = 1e-3;         // convergence: step below 1 mm
    double epsilon_yaw = 1e-3;        // and below ~0.057 deg
    double lambda = 1e-6;
    int max_step_halvings = 5;
    int min_valid_beams = 10;

    // Map-update throttle: skip insertion when the matched pose barely moved.
    double insert_translation_eps = 5e-3;
    double insert_yaw_eps = deg_to_rad(0.2);
};

struct MatchDiagnostics {
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    bool no_match = false;
    bool singular = false;
    std::vector<double> residual_history;  // accepted residuals, coarse to fine
};

class HectorSlam {
public:
    explicit HectorSlam(const HectorConfig& config = {});

    /// Coarse-to-fine match of `scan` starting from the current pose estimate.
    /// Does not modify the map or the stored pose.
    Pose2 match_scan(const LaserScan& scan);

    /// Full per-scan update: the first scan initializes the map at the origin;
    /// later scans are matched and then inserted unless throttled.
    Pose2 process_scan(const LaserScan& scan);

    /// Seed the map with a scan at a known pose (localization-style setup).
    void insert_scan_at(const Pose2& pose, const LaserScan& scan);

    /// Override the current estimate, e.g. to relocalize.
    void set_pose(const Pose2& pose) { pose_ = pose; }

    const Pose2& pose() const { return pose_; }
    const MapPyramid& pyramid() const { return pyramid_; }
    const MatchDiagnostics& last_match() const { return last_match_; }
    const HectorConfig& config() const { return config_; }

private:
    Pose2 match_on_grid(const OccupancyGrid& grid, const LaserScan& scan, Pose2 xi,
                        MatchDiagnostics& diag) const;

    HectorConfig config_;
    MapPyramid pyramid_;
    Pose2 pose_;
    Pose2 last_inserted_;
    bool initialized_ = false;
    MatchDiagnostics last_match_;
};

}  // namespace slamkit

#endif  // SLAMKIT_HECTOR_SLAM_HPP
