#include "slamkit/rbpf_slam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slamkit/correlative.hpp"
#include "slamkit/hector_slam.hpp"

namespace slamkit {

namespace {
constexpr std::uint64_t kPredictStream = 21;
constexpr std::uint64_t kResampleStream = 23;
}  // namespace

double effective_sample_size(const std::vector<double>& weights) {
    double sum_sq = 0.0;
    for (double w : weights) {
        sum_sq += w * w;
    }
    return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

std::vector<std::size_t> systematic_resample_indices(const std::vector<double>& weights,
                                                     double u) {
    const std::size_t n = weights.size();
    std::vector<std::size_t> out(n);
    double cumulative = weights.empty() ? 0.0 : weights[0];
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = (static_cast<double>(i) + u) / static_cast<double>(n);
        // right-continuous inverse CDF: skip any zero-weight prefix even at u = 0
        while (cumulative <= target && j + 1 < n) {
            ++j;
            cumulative += weights[j];
        }
        out[i] = j;
    }
    return out;
}

RbpfSlam::RbpfSlam(const RbpfConfig& config) : config_(config) {
    particles_.reserve(config_.particle_count);
    for (int i = 0; i < config_.particle_count; ++i) {
        Particle p;
        p.weight = 1.0 / config_.particle_count;
        p.map = OccupancyGrid::centered(config_.map_resolution, {0.0, 0.0},
                                        config_.map_extent, config_.map_extent);
        particles_.push_back(std::move(p));
    }
    n_eff_ = static_cast<double>(config_.particle_count);
}

void RbpfSlam::normalize_weights() {
    double sum = 0.0;
    for (const auto& p : particles_) {
        sum += p.weight;
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        degenerate_weights_ = true;
        const double uniform = 1.0 / particles_.size();
        for (auto& p : particles_) {
            p.weight = uniform;
        }
    } else {
        for (auto& p : particles_) {
            p.weight /= sum;
        }
    }
    std::vector<double> w(particles_.size());
    std::transform(particles_.begin(), particles_.end(), w.begin(),
                   [](const Particle& p) { return p.weight; });
    n_eff_ = effective_sample_size(w);
}

void RbpfSlam::predict(const Pose2& increment) {
    const double trans = norm(increment.translation());
    const double rot = std::abs(increment.yaw);
    const double scale = trans / config_.reference_translation +
                         rot / config_.reference_rotation;
    const double sxy = config_.sigma_xy * scale;
    const double syaw = config_.sigma_yaw * scale;

    for (std::size_t i = 0; i < particles_.size(); ++i) {
        Rng rng(mix_seed(config_.seed, kPredictStream,
                         (static_cast<std::uint64_t>(update_index_) << 16) | i));
        Pose2 noisy(increment.x + rng.gaussian(0.0, sxy),
                    increment.y + rng.gaussian(0.0, sxy),
                    increment.yaw + rng.gaussian(0.0, syaw));
        particles_[i].pose = compose(particles_[i].pose, noisy);
    }
}

void RbpfSlam::refine_and_weight(const LaserScan& scan) {
    const bool enough_beams =
        scan.valid_count() >= static_cast<std::size_t>(config_.min_valid_beams);

    for (auto& p : particles_) {
        double residual = scan_residual(p.map, scan, p.pose);
        if (enough_beams) {
            for (int it = 0; it < config_.refine_iterations; ++it) {
                const GaussNewtonResult step = gauss_newton_step(p.map, scan, p.pose);
                if (step.singular) {
                    break;
                }
                Pose2 delta = step.delta;
                Pose2 candidate(p.pose.x + delta.x, p.pose.y + delta.y,
                                p.pose.yaw + delta.yaw);
                double next = scan_residual(p.map, scan, candidate);
                int halvings = 0;
                while (next > residual && halvings < 3) {
                    delta = Pose2(delta.x / 2.0, delta.y / 2.0, delta.yaw / 2.0);
                    candidate = Pose2(p.pose.x + delta.x, p.pose.y + delta.y,
                                      p.pose.yaw + delta.yaw);
                    next = scan_residual(p.map, scan, candidate);
                    ++halvings;
                }
                if (next > residual) {
                    break;
                }
                p.pose = candidate;
                residual = next;
            }
        }
        p.weight *= std::exp(-config_.beta * residual);
    }
    degenerate_weights_ = false;
    normalize_weights();
}

void RbpfSlam::adaptive_resample() {
    last_update_resampled_ = false;
    n_eff_pre_resample_ = n_eff_;
    if (n_eff_ >= config_.resample_threshold * particles_.size()) {
        return;
    }
    std::vector<double> w(particles_.size());
    std::transform(particles_.begin(), particles_.end(), w.begin(),
                   [](const Particle& p) { return p.weight; });
    Rng rng(mix_seed(config_.seed, kResampleStream,
                     static_cast<std::uint64_t>(update_index_)));
    const auto picks = systematic_resample_indices(w, rng.uniform());

    std::vector<Particle> next;
    next.reserve(particles_.size());
    const double uniform = 1.0 / particles_.size();
    for (std::size_t idx : picks) {
        Particle p = particles_[idx];  // copies pose, map, and history
        p.weight = uniform;
        next.push_back(std::move(p));
    }
    particles_ = std::move(next);
    n_eff_ = static_cast<double>(particles_.size());
    last_update_resampled_ = true;
}

Pose2 RbpfSlam::estimate() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < particles_.size(); ++i) {
        if (particles_[i].weight > particles_[best].weight) {
            best = i;
        }
    }
    return particles_[best].pose;
}

// Scan-match odometry: match the scan against the best particle's map from a
// constant-velocity seed. Motion outside the correlative window stays
// unobserved; the caller falls back to the held increment.
Pose2 RbpfSlam::estimate_motion(const LaserScan& scan) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < particles_.size(); ++i) {
        if (particles_[i].weight > particles_[best].weight) {
            best = i;
        }
    }
    const OccupancyGrid& map = particles_[best].map;
    const Pose2 anchor = particles_[best].pose;
    Pose2 xi = compose(anchor, last_increment_);

    auto refine = [&](Pose2 p) {
        double current = scan_residual(map, scan, p);
        for (int iter = 0; iter < config_.motion_match_iterations; ++iter) {
            const GaussNewtonResult step = gauss_newton_step(map, scan, p);
            if (step.singular) {
                break;
            }
            Pose2 delta = step.delta;
            Pose2 candidate(p.x + delta.x, p.y + delta.y, p.yaw + delta.yaw);
            double next = scan_residual(map, scan, candidate);
            int halvings = 0;
            while (next > current && halvings < 5) {
                delta = Pose2(delta.x / 2.0, delta.y / 2.0, delta.yaw / 2.0);
                candidate = Pose2(p.x + delta.x, p.y + delta.y, p.yaw + delta.yaw);
                next = scan_residual(map, scan, candidate);
                ++halvings;
            }
            if (next > current) {
                break;
            }
            p = candidate;
            current = next;
            if (std::abs(delta.x) < 1e-3 && std::abs(delta.y) < 1e-3 &&
                std::abs(delta.yaw) < 1e-3) {
                break;
            }
        }
        return std::pair<Pose2, double>(p, current);
    };

    auto [matched, residual] = refine(xi);
    if (residual > config_.motion_realign_gate) {
        CorrelativeWindow window;
        window.half_translation = config_.motion_realign_half_translation;
        window.translation_step = config_.map_resolution;
        window.half_yaw = config_.motion_realign_half_yaw;
        window.yaw_step = deg_to_rad(1.5);
        const GridSearchResult coarse = grid_correlative_search(map, scan, xi, window);
        if (coarse.score > 0.0) {
            const auto [matched2, residual2] = refine(coarse.pose);
            if (residual2 < residual) {
                matched = matched2;
                residual = residual2;
            }
        }
    }
    if (residual > 0.2) {
        return last_increment_;  // poor overlap: keep the constant-velocity prior
    }
    return between(anchor, matched);
}

Pose2 RbpfSlam::process_scan(const LaserScan& scan) {
    const long index = scan_index_++;
    if (!initialized_) {
        for (auto& p : particles_) {
            p.pose = Pose2();
            p.map.insert_scan(p.pose, scan);
            p.history.append(scan.timestamp, p.pose);
        }
        initialized_ = true;
        last_estimate_ = Pose2();
        last_increment_ = Pose2();
        ++update_index_;
        return last_estimate_;
    }
    if (index % config_.scan_cadence != 0) {
        return last_estimate_;  // hold between updates
    }

    const Pose2 increment = estimate_motion(scan);
    predict(increment);
    refine_and_weight(scan);
    adaptive_resample();
    for (auto& p : particles_) {
        p.map.insert_scan(p.pose, scan);
        if (p.history.empty() || scan.timestamp > p.history.end_time()) {
            p.history.append(scan.timestamp, p.pose);
        }
    }

    last_increment_ = increment;
    last_estimate_ = estimate();
    ++update_index_;
    return last_estimate_;
}

}  // namespace slamkit
