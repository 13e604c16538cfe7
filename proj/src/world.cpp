#include "slamkit/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace slamkit {

namespace {

World rectangle_world(std::string name, double half_x, double half_y) {
    World w;
    w.name = std::move(name);
    const Vec2 c0{-half_x, -half_y};
    const Vec2 c1{half_x, -half_y};
    const Vec2 c2{half_x, half_y};
    const Vec2 c3{-half_x, half_y};
    w.segments = {{c0, c1}, {c1, c2}, {c2, c3}, {c3, c0}};
    return w;
}

}  // namespace

World make_lab_world() { return rectangle_world("lab", 3.0, 3.0); }

World make_tunnel_world() { return rectangle_world("tunnel", 15.0, 3.0); }

World load_world(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("world file not found: " + path);
    }
    nlohmann::json j;
    in >> j;
    World w;
    w.name = j.value("name", path);
    for (const auto& s : j.at("segments")) {
        if (!s.is_array() || s.size() != 4) {
            throw std::runtime_error("world file " + path +
                                     ": each segment must be [ax, ay, bx, by]");
        }
        w.segments.push_back({{s[0].get<double>(), s[1].get<double>()},
                              {s[2].get<double>(), s[3].get<double>()}});
    }
    if (w.segments.size() < 3) {
        throw std::runtime_error("world file " + path + ": need at least 3 segments");
    }
    return w;
}

RayHit ray_cast(const World& world, const Vec2& origin, double direction,
                double range_min, double range_max) {
    if (!std::isfinite(direction)) {
        throw std::invalid_argument("ray_cast: non-finite direction");
    }
    const Vec2 d{std::cos(direction), std::sin(direction)};
    double best = std::numeric_limits<double>::infinity();

    for (const auto& seg : world.segments) {
        // origin + t*d == a + s*(b - a), t >= 0, s in [0, 1]
        const Vec2 e = seg.b - seg.a;
        const double denom = d.x * e.y - d.y * e.x;
        if (std::abs(denom) < 1e-15) {
            continue;  // parallel
        }
        const Vec2 ao = seg.a - origin;
        const double t = (ao.x * e.y - ao.y * e.x) / denom;
        const double s = (ao.x * d.y - ao.y * d.x) / denom;
        if (t >= 0.0 && s >= 0.0 && s <= 1.0) {
            best = std::min(best, t);
        }
    }

    if (!std::isfinite(best) || best > range_max) {
        return {RayHit::Status::no_hit, 0.0};
    }
    if (best < range_min) {
        return {RayHit::Status::too_close, best};
    }
    return {RayHit::Status::hit, best};
}

double distance_to_walls(const World& world, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seg : world.segments) {
        const Vec2 e = seg.b - seg.a;
        const double len2 = e.x * e.x + e.y * e.y;
        double u = 0.0;
        if (len2 > 0.0) {
            u = std::clamp(((p.x - seg.a.x) * e.x + (p.y - seg.a.y) * e.y) / len2, 0.0, 1.0);
        }
        const Vec2 q = seg.a + u * e;
        best = std::min(best, norm(p - q));
    }
    return best;
}

}  // namespace slamkit
