// Trajectory evaluation: time alignment of a high-rate truth stream to the
// estimate timestamps, displacement and RMSE metrics, yaw error, delay
// estimation, and per-approach aggregation.

#ifndef SLAMKIT_EVALUATION_HPP
#define SLAMKIT_EVALUATION_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slamkit/pose.hpp"
#include "slamkit/trajectory.hpp"

namespace slamkit {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename PoseT>
struct AlignedPair {
    double t = 0.0;
    PoseT truth;
    PoseT estimate;
    bool stale = false;  // truth was frozen around this timestamp
};

using AlignedPair2 = AlignedPair<Pose2>;
using AlignedPair3 = AlignedPair<Pose3>;

/// Interpolate truth at each estimate timestamp inside the truth span
/// (positions linearly, angles on the shortest arc). Pairs bracketed by
/// truth samples that repeat identically for longer than stale_window are
/// flagged stale. Throws EvalError when the spans do not overlap.
std::vector<AlignedPair2> align(const Trajectory2& truth, const Trajectory2& estimate,
                                double stale_window = 0.5);
std::vector<AlignedPair3> align(const Trajectory3& truth, const Trajectory3& estimate,
                                double stale_window = 0.5);

double displacement2(const Pose2& truth, const Pose2& estimate);
double displacement3(const Pose3& truth, const Pose3& estimate);

/// error_norm: RMSE of the per-pair displacement (absolute trajectory error).
/// literal_diff: RMSE of the difference between each pose's distance from
/// the scenario origin — the subtract-two-displacements reading.
enum class RmseMode { error_norm, literal_diff };

/// Root-mean-square error over non-stale pairs, in centimeters.
double rmse_cm(const std::vector<AlignedPair2>& pairs, RmseMode mode = RmseMode::error_norm);
double rmse_cm(const std::vector<AlignedPair3>& pairs, RmseMode mode = RmseMode::error_norm);

/// RMSE of the shortest-arc yaw error, in degrees.
double yaw_rmse_deg(const std::vector<AlignedPair2>& pairs);
double yaw_rmse_deg(const std::vector<AlignedPair3>& pairs);

struct DelayEstimate {
    bool defined = false;  // false for flat (zero-variance) series
    double seconds = 0.0;
};

/// Lag in [0, max_lag] maximizing the cross-correlation of the unwrapped yaw
/// series, brute force over integer sample lags. Series must share a uniform
/// grid with spacing dt.
DelayEstimate estimate_delay(const std::vector<double>& truth_yaw,
                             const std::vector<double>& estimate_yaw, double dt,
                             double max_lag);

/// Sample a trajectory's yaw on a uniform grid via shortest-arc interpolation.
std::vector<double> yaw_series(const Trajectory2& traj, double t0, double dt, std::size_t n);

/// Cumulative unwrap: consecutive differences mapped to (-pi, pi].
std::vector<double> unwrap_angles(const std::vector<double>& wrapped);

struct EvalReport {
    std::map<std::string, double> scenario_rmse_cm;
    double average_rmse_cm = 0.0;
};

/// Arithmetic mean across the scenarios present.
EvalReport aggregate(const std::map<std::string, double>& per_scenario_cm);

}  // namespace slamkit

#endif  // SLAMKIT_EVALUATION_HPP
