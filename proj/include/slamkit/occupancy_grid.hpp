// Log-odds occupancy grid over a lattice of sample nodes. Node (i, j) sits at
// origin (+) (i * resolution, j * resolution); world_to_map returns continuous
// node coordinates so node values can be interpolated bilinearly.

#ifndef SLAMKIT_OCCUPANCY_GRID_HPP
#define SLAMKIT_OCCUPANCY_GRID_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "slamkit/pose.hpp"
#include "slamkit/sensor_types.hpp"

namespace slamkit {

// Inverse sensor model increments and the saturation clamp.
inline constexpr double kLogOddsHit = 0.847;
inline constexpr double kLogOddsMiss = -0.405;
inline constexpr double kLogOddsClamp = 4.0;
inline constexpr double kUnknownProbability = 0.5;

struct MapCoords {
    double mx = 0.0;
    double my = 0.0;
    bool in_bounds = false;
};

struct Interpolation {
    double value = kUnknownProbability;
    double dx = 0.0;  // probability per node step in x
    double dy = 0.0;
    bool in_bounds = false;
};

enum class CellObservation { hit, miss };

class OccupancyGrid {
public:
    OccupancyGrid() = default;
    OccupancyGrid(double resolution, const Pose2& origin, int width, int height);

    /// Grid covering extent_x by extent_y meters centered on `center` (axis aligned).
    static OccupancyGrid centered(double resolution, const Vec2& center,
                                  double extent_x, double extent_y);

    double resolution() const { return resolution_; }
    const Pose2& origin() const { return origin_; }
    int width() const { return width_; }
    int height() const { return height_; }
    std::int64_t dropped_updates() const { return dropped_updates_; }

    bool contains(int ix, int iy) const {
        return ix >= 0 && ix < width_ && iy >= 0 && iy < height_;
    }

    double log_odds(int ix, int iy) const { return log_odds_[index(ix, iy)]; }
    double probability(int ix, int iy) const { return prob_[index(ix, iy)]; }

    /// Affine inverse of origin/resolution. Out-of-bounds coordinates are
    /// returned as-is with in_bounds = false.
    MapCoords world_to_map(const Vec2& p) const;
    Vec2 map_to_world(double mx, double my) const;

    /// Bilinear probability and its analytic gradient at continuous node
    /// coordinates. Queries whose four support nodes are not all in bounds
    /// report the unknown probability with zero gradient.
    Interpolation interpolate(double mx, double my) const {
        const int x0 = static_cast<int>(std::floor(mx));
        const int y0 = static_cast<int>(std::floor(my));
        if (x0 < 0 || y0 < 0 || x0 + 1 >= width_ || y0 + 1 >= height_) {
            return {};
        }
        const double tx = mx - x0;
        const double ty = my - y0;
        const float* row0 = prob_.data() + static_cast<std::size_t>(y0) * width_ + x0;
        const float* row1 = row0 + width_;
        const double p00 = row0[0];
        const double p10 = row0[1];
        const double p01 = row1[0];
        const double p11 = row1[1];
        Interpolation out;
        out.value = (1.0 - ty) * ((1.0 - tx) * p00 + tx * p10) +
                    ty * ((1.0 - tx) * p01 + tx * p11);
        out.dx = (1.0 - ty) * (p10 - p00) + ty * (p11 - p01);
        out.dy = (1.0 - tx) * (p01 - p00) + tx * (p11 - p10);
        out.in_bounds = true;
        return out;
    }

    /// Apply a hit or miss increment with clamping. Out-of-bounds cells are
    /// ignored and counted in dropped_updates().
    void update_cell(int ix, int iy, CellObservation obs);

    /// Insert a scan taken at `pose` (world frame): every valid beam marks a
    /// hit at its endpoint node and misses along the ray from the sensor node
    /// (endpoint excluded). Invalid beams are skipped.
    void insert_scan(const Pose2& pose, const LaserScan& scan);

    /// P2 portable graymap, one node per pixel, probability scaled to 0..255,
    /// plus a sidecar metadata text file.
    void export_pgm(const std::string& pgm_path, const std::string& meta_path) const;

    std::uint64_t content_hash() const;

    bool operator==(const OccupancyGrid& other) const;

private:
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * width_ + ix;
    }

    double resolution_ = 0.05;
    Pose2 origin_;
    int width_ = 0;
    int height_ = 0;
    std::vector<float> log_odds_;
    std::vector<float> prob_;  // kept in lockstep with log_odds_
    std::int64_t dropped_updates_ = 0;
};

}  // namespace slamkit

#endif  // SLAMKIT_OCCUPANCY_GRID_HPP
