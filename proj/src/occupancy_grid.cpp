#include "slamkit/occupancy_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace slamkit {

namespace {

float logistic(float l) { return 1.0f / (1.0f + std::exp(-l)); }

int nearest_node(double m) { return static_cast<int>(std::lround(m)); }

}  // namespace

OccupancyGrid::OccupancyGrid(double resolution, const Pose2& origin, int width, int height)
    : resolution_(resolution), origin_(origin), width_(width), height_(height) {
    if (resolution <= 0.0 || width <= 0 || height <= 0) {
        throw std::invalid_argument("OccupancyGrid: resolution and dimensions must be positive");
    }
    log_odds_.assign(static_cast<std::size_t>(width) * height, 0.0f);
    prob_.assign(log_odds_.size(), static_cast<float>(kUnknownProbability));
}

OccupancyGrid OccupancyGrid::centered(double resolution, const Vec2& center,
                                      double extent_x, double extent_y) {
    const int width = static_cast<int>(std::lround(extent_x / resolution)) + 1;
    const int height = static_cast<int>(std::lround(extent_y / resolution)) + 1;
    const Pose2 origin(center.x - extent_x / 2.0, center.y - extent_y / 2.0, 0.0);
    return OccupancyGrid(resolution, origin, width, height);
}

MapCoords OccupancyGrid::world_to_map(const Vec2& p) const {
    const double c = std::cos(origin_.yaw);
    const double s = std::sin(origin_.yaw);
    const double dx = p.x - origin_.x;
    const double dy = p.y - origin_.y;
    MapCoords out;
    out.mx = (c * dx + s * dy) / resolution_;
    out.my = (-s * dx + c * dy) / resolution_;
    out.in_bounds = out.mx >= 0.0 && out.mx <= width_ - 1 &&
                    out.my >= 0.0 && out.my <= height_ - 1;
    return out;
}

Vec2 OccupancyGrid::map_to_world(double mx, double my) const {
    return origin_.transform({mx * resolution_, my * resolution_});
}

void OccupancyGrid::update_cell(int ix, int iy, CellObservation obs) {
    if (!contains(ix, iy)) {
        ++dropped_updates_;
        return;
    }
    const std::size_t k = index(ix, iy);
    const double inc = obs == CellObservation::hit ? kLogOddsHit : kLogOddsMiss;
    const double l = std::clamp(log_odds_[k] + inc, -kLogOddsClamp, kLogOddsClamp);
    log_odds_[k] = static_cast<float>(l);
    prob_[k] = logistic(log_odds_[k]);
}

void OccupancyGrid::insert_scan(const Pose2& pose, const LaserScan& scan) {
    const MapCoords sensor = world_to_map(pose.translation());
    const int sx = nearest_node(sensor.mx);
    const int sy = nearest_node(sensor.my);

    for (std::size_t i = 0; i < scan.beam_count(); ++i) {
        if (!scan.valid[i]) {
            continue;
        }
        const Vec2 end_world = pose.transform(scan.beam_point(i));
        const MapCoords end = world_to_map(end_world);
        const int ex = nearest_node(end.mx);
        const int ey = nearest_node(end.my);

        // Bresenham from the sensor node to the endpoint node, endpoint excluded.
        int x = sx;
        int y = sy;
        const int dx = std::abs(ex - sx);
        const int dy = -std::abs(ey - sy);
        const int step_x = sx < ex ? 1 : -1;
        const int step_y = sy < ey ? 1 : -1;
        int err = dx + dy;
        while (x != ex || y != ey) {
            update_cell(x, y, CellObservation::miss);
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x += step_x;
            }
            if (e2 <= dx) {
                err += dx;
                y += step_y;
            }
        }
        update_cell(ex, ey, CellObservation::hit);
    }
}

void OccupancyGrid::export_pgm(const std::string& pgm_path, const std::string& meta_path) const {
    std::ofstream pgm(pgm_path);
    if (!pgm) {
        throw std::runtime_error("cannot write " + pgm_path);
    }
    pgm << "P2\n" << width_ << " " << height_ << "\n255\n";
    // Row 0 of the file is the top of the image (max y).
    for (int iy = height_ - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < width_; ++ix) {
            const int v = static_cast<int>(std::lround(probability(ix, iy) * 255.0));
            pgm << v << (ix + 1 == width_ ? '\n' : ' ');
        }
    }

    std::ofstream meta(meta_path);
    if (!meta) {
        throw std::runtime_error("cannot write " + meta_path);
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "resolution: %.6f\norigin: %.6f %.6f %.6f\nwidth: %d\nheight: %d\n",
                  resolution_, origin_.x, origin_.y, origin_.yaw, width_, height_);
    meta << buf;
}

std::uint64_t OccupancyGrid::content_hash() const {
    // FNV-1a over the raw log-odds bytes.
    std::uint64_t h = 1469598103934665603ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(log_odds_.data());
    const std::size_t n = log_odds_.size() * sizeof(float);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

bool OccupancyGrid::operator==(const OccupancyGrid& other) const {
    return resolution_ == other.resolution_ && width_ == other.width_ &&
           height_ == other.height_ && origin_.x == other.origin_.x &&
           origin_.y == other.origin_.y && origin_.yaw == other.origin_.yaw &&
           log_odds_ == other.log_odds_;
}

}  // namespace slamkit
