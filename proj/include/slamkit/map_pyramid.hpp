// Multi-resolution stack of occupancy grids. Level k doubles the base cell
// size; every level covers the same world extent and is updated independently
// so each one stays a valid map for coarse-to-fine matching.

#ifndef SLAMKIT_MAP_PYRAMID_HPP
#define SLAMKIT_MAP_PYRAMID_HPP

#include <vector>

#include "slamkit/occupancy_grid.hpp"

namespace slamkit {

class MapPyramid {
public:
    MapPyramid() = default;
    MapPyramid(double base_resolution, const Vec2& center, double extent, int levels);

    int level_count() const { return static_cast<int>(levels_.size()); }
    const OccupancyGrid& level(int k) const { return levels_[k]; }
    OccupancyGrid& level(int k) { return levels_[k]; }
    const OccupancyGrid& finest() const { return levels_.front(); }

    void insert_scan(const Pose2& pose, const LaserScan& scan);

private:
    std::vector<OccupancyGrid> levels_;
};

}  // namespace slamkit

#endif  // SLAMKIT_MAP_PYRAMID_HPP
