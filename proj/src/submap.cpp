#include "slamkit/submap.hpp"

namespace slamkit {

Submap::Submap(double resolution, double extent, const Pose2& origin_global,
               int finish_threshold)
    : grid_(OccupancyGrid::centered(resolution, {0.0, 0.0}, extent, extent)),
      origin_global_(origin_global),
      finish_threshold_(finish_threshold) {}

bool Submap::insert_scan_local(const Pose2& local_pose, const LaserScan& scan) {
    if (finished() || scans_inserted_ >= finish_threshold_) {
        return false;
    }
    grid_.insert_scan(local_pose, scan);
    ++scans_inserted_;
    if (scans_inserted_ >= finish_threshold_) {
        state_ = State::finished;
    }
    return true;
}

}  // namespace slamkit
