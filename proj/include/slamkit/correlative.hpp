// Exhaustive correlative matching over a discretized pose window: the score
// is the fraction of valid beam endpoints landing on occupied cells. This is
// deliberately a literal brute force; small windows keep it cheap.

#ifndef SLAMKIT_CORRELATIVE_HPP
#define SLAMKIT_CORRELATIVE_HPP

#include "slamkit/occupancy_grid.hpp"
#include "slamkit/pose.hpp"
#include "slamkit/sensor_types.hpp"

namespace slamkit {

struct CorrelativeWindow {
    double half_translation = 0.5;
    double translation_step = 0.05;  // one grid cell
    double half_yaw = deg_to_rad(15.0);
    double yaw_step = deg_to_rad(1.0);
};

struct GridSearchResult {
    Pose2 pose;          // same frame as `center`
    double score = -1.0; // -1 when the scan has no valid beams
};

/// Search the window around `center` in the grid's own frame. Ties break to
/// the lowest (yaw, x, y) offset, so the result is independent of iteration
/// order.
GridSearchResult grid_correlative_search(const OccupancyGrid& grid, const LaserScan& scan,
                                         const Pose2& center, const CorrelativeWindow& window,
                                         double occupied_threshold = 0.55);

}  // namespace slamkit

#endif  // SLAMKIT_CORRELATIVE_HPP
