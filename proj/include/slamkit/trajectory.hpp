// Timestamped pose series used for ground truth and SLAM estimates.

#ifndef SLAMKIT_TRAJECTORY_HPP
#define SLAMKIT_TRAJECTORY_HPP

#include <stdexcept>
#include <vector>

#include "slamkit/pose.hpp"

namespace slamkit {

template <typename PoseT>
struct TimedPose {
    double t = 0.0;  // seconds since scenario start
    PoseT pose;
};

using TimedPose2 = TimedPose<Pose2>;
using TimedPose3 = TimedPose<Pose3>;

// Timestamps are strictly increasing; append() enforces it.
template <typename PoseT>
struct TrajectoryT {
    std::vector<TimedPose<PoseT>> samples;

    void append(double t, const PoseT& pose) {
        if (!samples.empty() && t <= samples.back().t) {
            throw std::invalid_argument("trajectory timestamps must be strictly increasing");
        }
        samples.push_back({t, pose});
    }

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    double start_time() const { return samples.front().t; }
    double end_time() const { return samples.back().t; }
};

using Trajectory2 = TrajectoryT<Pose2>;
using Trajectory3 = TrajectoryT<Pose3>;

inline Trajectory2 planar(const Trajectory3& traj) {
    Trajectory2 out;
    out.samples.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        out.samples.push_back({s.t, s.pose.planar()});
    }
    return out;
}

}  // namespace slamkit

#endif  // SLAMKIT_TRAJECTORY_HPP
