// A bounded-lifetime grid built from a run of consecutive scans. The grid
// lives in the submap-local frame; origin_global places it in the world.
// Once finished a submap never accepts another insertion.

#ifndef SLAMKIT_SUBMAP_HPP
#define SLAMKIT_SUBMAP_HPP

#include <cstdint>

#include "slamkit/occupancy_grid.hpp"

namespace slamkit {

class Submap {
public:
    enum class State { active, finished };

    Submap(double resolution, double extent, const Pose2& origin_global, int finish_threshold);

    const OccupancyGrid& grid() const { return grid_; }
    const Pose2& origin_global() const { return origin_global_; }
    void set_origin_global(const Pose2& p) { origin_global_ = p; }

    State state() const { return state_; }
    bool finished() const { return state_ == State::finished; }
    int scans_inserted() const { return scans_inserted_; }
    int finish_threshold() const { return finish_threshold_; }

    /// Insert a scan at a pose expressed in the submap-local frame. Returns
    /// false (and leaves the grid untouched) when the submap is finished.
    bool insert_scan_local(const Pose2& local_pose, const LaserScan& scan);

    void finish() { state_ = State::finished; }

    std::uint64_t grid_hash() const { return grid_.content_hash(); }

private:
    OccupancyGrid grid_;
    Pose2 origin_global_;
    State state_ = State::active;
    int scans_inserted_ = 0;
    int finish_threshold_;
};

}  // namespace slamkit

#endif  // SLAMKIT_SUBMAP_HPP
