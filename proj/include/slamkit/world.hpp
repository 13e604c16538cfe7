// 2D worlds made of wall segments, plus ray casting against them.

#ifndef SLAMKIT_WORLD_HPP
#define SLAMKIT_WORLD_HPP

#include <string>
#include <vector>

#include "slamkit/pose.hpp"

namespace slamkit {

struct Segment {
    Vec2 a;
    Vec2 b;
};

struct World {
    std::string name;
    std::vector<Segment> segments;
};

/// 6 m x 6 m square room centered on the origin.
World make_lab_world();

/// 6 m wide, 30 m long corridor with end caps, centered on the origin.
World make_tunnel_world();

/// Load a world from a JSON file: {"name": ..., "segments": [[ax,ay,bx,by], ...]}.
World load_world(const std::string& path);

struct RayHit {
    enum class Status { hit, no_hit, too_close };
    Status status = Status::no_hit;
    double range = 0.0;  // meaningful for hit and too_close
};

/// Distance from `origin` along `direction` to the nearest segment.
/// Distances beyond range_max report no_hit; below range_min, too_close.
RayHit ray_cast(const World& world, const Vec2& origin, double direction,
                double range_min, double range_max);

/// Distance from a point to the nearest wall segment.
double distance_to_walls(const World& world, const Vec2& p);

}  // namespace slamkit

#endif  // SLAMKIT_WORLD_HPP
