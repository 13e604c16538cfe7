#include "slamkit/correlative.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace slamkit {

GridSearchResult grid_correlative_search(const OccupancyGrid& grid, const LaserScan& scan,
                                         const Pose2& center, const CorrelativeWindow& window,
                                         double occupied_threshold) {
    std::vector<Vec2> beams;
    beams.reserve(scan.beam_count());
    for (std::size_t i = 0; i < scan.beam_count(); ++i) {
        if (scan.valid[i]) {
            beams.push_back(scan.beam_point(i));
        }
    }
    if (beams.empty()) {
        return {center, -1.0};
    }

    const double res = grid.resolution();
    const int yaw_steps = static_cast<int>(std::lround(window.half_yaw / window.yaw_step));
    const int trans_steps =
        static_cast<int>(std::lround(window.half_translation / window.translation_step));
    const int step_cells =
        std::max(1, static_cast<int>(std::lround(window.translation_step / res)));

    GridSearchResult best;
    best.pose = center;
    std::vector<int> node_x(beams.size());
    std::vector<int> node_y(beams.size());

    for (int iy = -yaw_steps; iy <= yaw_steps; ++iy) {
        const double yaw = center.yaw + iy * window.yaw_step;
        const double c = std::cos(yaw);
        const double s = std::sin(yaw);
        // Endpoint nodes at the window center; integer cell offsets then
        // cover the translation window exactly.
        for (std::size_t i = 0; i < beams.size(); ++i) {
            const Vec2 e{center.x + c * beams[i].x - s * beams[i].y,
                         center.y + s * beams[i].x + c * beams[i].y};
            const MapCoords mc = grid.world_to_map(e);
            node_x[i] = static_cast<int>(std::lround(mc.mx));
            node_y[i] = static_cast<int>(std::lround(mc.my));
        }
        for (int ix = -trans_steps; ix <= trans_steps; ++ix) {
            for (int iyy = -trans_steps; iyy <= trans_steps; ++iyy) {
                int hits = 0;
                for (std::size_t i = 0; i < beams.size(); ++i) {
                    const int nx = node_x[i] + ix * step_cells;
                    const int ny = node_y[i] + iyy * step_cells;
                    if (grid.contains(nx, ny) &&
                        grid.probability(nx, ny) > occupied_threshold) {
                        ++hits;
                    }
                }
                const double score =
                    static_cast<double>(hits) / static_cast<double>(beams.size());
                if (score > best.score) {
                    best.score = score;
                    best.pose = Pose2(center.x + ix * window.translation_step,
                                      center.y + iyy * window.translation_step, yaw);
                }
            }
        }
    }
    return best;
}

}  // namespace slamkit
