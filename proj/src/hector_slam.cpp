#include "slamkit/hector_slam.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace slamkit {

double scan_residual(const OccupancyGrid& grid, const LaserScan& scan, const Pose2& xi) {
    const double c = std::cos(xi.yaw);
    const double s = std::sin(xi.yaw);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < scan.beam_count(); ++i) {
        if (!scan.valid[i]) {
            continue;
        }
        const Vec2 b = scan.beam_point(i);
        const Vec2 w{xi.x + c * b.x - s * b.y, xi.y + s * b.x + c * b.y};
        const MapCoords mc = grid.world_to_map(w);
        const Interpolation m = grid.interpolate(mc.mx, mc.my);
        const double r = 1.0 - m.value;
        sum += r * r;
        ++n;
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

GaussNewtonResult gauss_newton_step(const OccupancyGrid& grid, const LaserScan& scan,
                                    const Pose2& xi, double lambda) {
    GaussNewtonResult out;
    const double c = std::cos(xi.yaw);
    const double s = std::sin(xi.yaw);
    const double inv_res = 1.0 / grid.resolution();
    const double oc = std::cos(grid.origin().yaw);
    const double os = std::sin(grid.origin().yaw);

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    double residual_sum = 0.0;
    std::size_t n = 0;

    for (std::size_t i = 0; i < scan.beam_count(); ++i) {
        if (!scan.valid[i]) {
            continue;
        }
        const Vec2 p = scan.beam_point(i);
        const Vec2 w{xi.x + c * p.x - s * p.y, xi.y + s * p.x + c * p.y};
        const MapCoords mc = grid.world_to_map(w);
        const Interpolation m = grid.interpolate(mc.mx, mc.my);
        const double r = 1.0 - m.value;
        residual_sum += r * r;
        ++n;
        if (!m.in_bounds) {
            continue;  // unknown region contributes no gradient
        }

        // Map gradient from node units back to the world frame.
        const double gx = (m.dx * oc - m.dy * os) * inv_res;
        const double gy = (m.dx * os + m.dy * oc) * inv_res;

        // d(endpoint)/d(yaw) for an endpoint at body point p.
        const double jx = -s * p.x - c * p.y;
        const double jy = c * p.x - s * p.y;

        const Eigen::Vector3d g(gx, gy, gx * jx + gy * jy);
        h.noalias() += g * g.transpose();
        b.noalias() += g * r;
    }

    out.residual = n > 0 ? residual_sum / static_cast<double>(n) : 0.0;
    out.hessian = h;

    Eigen::Matrix3d damped = h + lambda * Eigen::Matrix3d::Identity();
    const Eigen::Vector3d delta = damped.ldlt().solve(b);
    if (!delta.allFinite()) {
        out.singular = true;
        return out;
    }
    out.delta = Pose2(delta.x(), delta.y(), delta.z());
    return out;
}

HectorSlam::HectorSlam(const HectorConfig& config)
    : config_(config),
      pyramid_(config.base_resolution, {0.0, 0.0}, config.map_extent, config.pyramid_levels) {}

Pose2 HectorSlam::match_on_grid(const OccupancyGrid& grid, const LaserScan& scan, Pose2 xi,
                                MatchDiagnostics& diag) const {
    double current = scan_residual(grid, scan, xi);
    diag.residual_history.push_back(current);

    for (int iter = 0; iter < config_.max_iterations; ++iter) {
        GaussNewtonResult step = gauss_newton_step(grid, scan, xi, config_.lambda);
        if (step.singular) {
            diag.singular = true;
            break;
        }
        Pose2 delta = step.delta;
        Pose2 candidate(xi.x + delta.x, xi.y + delta.y, xi.yaw + delta.yaw);
        double next = scan_residual(grid, scan, candidate);

        int halvings = 0;
        while (next > current && halvings < config_.max_step_halvings) {
            delta = Pose2(delta.x / 2.0, delta.y / 2.0, delta.yaw / 2.0);
            candidate = Pose2(xi.x + delta.x, xi.y + delta.y, xi.yaw + delta.yaw);
            next = scan_residual(grid, scan, candidate);
            ++halvings;
        }
        if (next > current) {
            break;  // no acceptable step at this level
        }

        xi = candidate;
        current = next;
        ++diag.iterations;
        diag.residual_history.push_back(current);

        if (std::abs(delta.x) < config_.epsilon_xy && std::abs(delta.y) < config_.epsilon_xy &&
            std::abs(delta.yaw) < config_.epsilon_yaw) {
            diag.converged = true;
            break;
        }
    }
    diag.final_residual = current;
    return xi;
}

Pose2 HectorSlam::match_scan(const LaserScan& scan) {
    last_match_ = MatchDiagnostics{};
    if (scan.valid_count() < static_cast<std::size_t>(config_.min_valid_beams)) {
        last_match_.no_match = true;
        return pose_;
    }
    Pose2 xi = pose_;
    for (int k = pyramid_.level_count() - 1; k >= 0; --k) {
        xi = match_on_grid(pyramid_.level(k), scan, xi, last_match_);
    }
    return xi;
}

void HectorSlam::insert_scan_at(const Pose2& pose, const LaserScan& scan) {
    pyramid_.insert_scan(pose, scan);
    last_inserted_ = pose;
    initialized_ = true;
}

Pose2 HectorSlam::process_scan(const LaserScan& scan) {
    if (!initialized_) {
        pose_ = Pose2();
        pyramid_.insert_scan(pose_, scan);
        last_inserted_ = pose_;
        initialized_ = true;
        last_match_ = MatchDiagnostics{};
        return pose_;
    }

    const Pose2 matched = match_scan(scan);
    if (last_match_.no_match) {
        return pose_;  // hold pose, leave the map alone
    }
    pose_ = matched;

    const double moved = norm(matched.translation() - last_inserted_.translation());
    const double turned = std::abs(angular_diff(matched.yaw, last_inserted_.yaw));
    if (moved > config_.insert_translation_eps || turned > config_.insert_yaw_eps) {
        pyramid_.insert_scan(matched, scan);
        last_inserted_ = matched;
    }
    return pose_;
}

}  // namespace slamkit
