#include "slamkit/map_pyramid.hpp"

#include <stdexcept>

namespace slamkit {

MapPyramid::MapPyramid(double base_resolution, const Vec2& center, double extent, int levels) {
    if (levels < 1) {
        throw std::invalid_argument("MapPyramid: need at least one level");
    }
    levels_.reserve(levels);
    double res = base_resolution;
    for (int k = 0; k < levels; ++k) {
        levels_.push_back(OccupancyGrid::centered(res, center, extent, extent));
        res *= 2.0;
    }
}

void MapPyramid::insert_scan(const Pose2& pose, const LaserScan& scan) {
    for (auto& grid : levels_) {
        grid.insert_scan(pose, scan);
    }
}

}  // namespace slamkit
