#include "slamkit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slamkit {

namespace {

constexpr std::uint64_t kScanStream = 11;
constexpr std::uint64_t kAltStream = 13;

// Analytic planar paths, evaluable at any time.
struct RectPath {
    double speed;
    std::vector<Vec2> corners;
    std::vector<double> cumulative;

    RectPath(double speed_, double width, double height) : speed(speed_) {
        const double hw = width / 2.0;
        corners = {{0.0, 0.0}, {hw, 0.0}, {hw, height}, {-hw, height}, {-hw, 0.0}, {0.0, 0.0}};
        cumulative.assign(corners.size(), 0.0);
        for (std::size_t i = 1; i < corners.size(); ++i) {
            cumulative[i] = cumulative[i - 1] + norm(corners[i] - corners[i - 1]);
        }
    }

    double duration() const { return cumulative.back() / speed; }

    Pose2 at(double t) const {
        double s = std::clamp(t * speed, 0.0, cumulative.back());
        std::size_t i = 1;
        while (i + 1 < cumulative.size() && s > cumulative[i]) {
            ++i;
        }
        const double seg_len = cumulative[i] - cumulative[i - 1];
        const double u = seg_len > 0.0 ? (s - cumulative[i - 1]) / seg_len : 0.0;
        const Vec2 p = corners[i - 1] + u * (corners[i] - corners[i - 1]);
        return Pose2(p.x, p.y, 0.0);  // heading fixed forward
    }
};

struct Fig8Path {
    double speed;
    double radius;

    double duration() const { return 4.0 * kPi * radius / speed; }

    Pose2 at(double t) const {
        const double omega = speed / radius;
        const double half = duration() / 2.0;
        if (t < half) {
            // upper circle, counterclockwise, entered at its bottom
            const double phi = -kPi / 2.0 + omega * t;
            return Pose2(radius * std::cos(phi), radius + radius * std::sin(phi),
                         phi + kPi / 2.0);
        }
        // lower circle, clockwise, entered at its top
        const double psi = kPi / 2.0 - omega * (t - half);
        return Pose2(radius * std::cos(psi), -radius + radius * std::sin(psi),
                     psi - kPi / 2.0);
    }
};

template <typename Path>
Trajectory2 sample_path(const Path& path, double rate_hz) {
    Trajectory2 out;
    const double duration = path.duration();
    const long n = static_cast<long>(std::floor(duration * rate_hz + 1e-9));
    for (long k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / rate_hz;
        out.append(t, path.at(t));
    }
    if (out.end_time() < duration - 1e-9) {
        out.append(duration, path.at(duration));
    }
    return out;
}

}  // namespace

LaserScan generate_scan(const World& world, const Pose2& pose, const LidarParams& params,
                        Rng& rng, double timestamp) {
    LaserScan scan;
    scan.timestamp = timestamp;
    scan.angle_min = params.angle_min;
    scan.angle_increment = params.angle_increment();
    scan.range_min = params.range_min;
    scan.range_max = params.range_max;
    scan.ranges.assign(params.beam_count, 0.0);
    scan.valid.assign(params.beam_count, false);

    if (distance_to_walls(world, pose.translation()) < 1e-3) {
        return scan;  // inside a wall: degenerate, all beams invalid
    }

    for (int i = 0; i < params.beam_count; ++i) {
        const double direction = pose.yaw + scan.beam_angle(i);
        const RayHit hit = ray_cast(world, pose.translation(), direction,
                                    params.range_min, params.range_max);
        if (hit.status != RayHit::Status::hit) {
            continue;
        }
        double r = hit.range;
        if (params.sigma > 0.0) {
            r = std::clamp(r + rng.gaussian(0.0, params.sigma),
                           params.range_min, params.range_max);
        }
        scan.ranges[i] = r;
        scan.valid[i] = true;
    }
    return scan;
}

Trajectory2 rectangle_trajectory(double speed, double width, double height, double rate_hz) {
    if (speed <= 0.0) {
        throw std::invalid_argument("rectangle_trajectory: speed must be positive");
    }
    return sample_path(RectPath(speed, width, height), rate_hz);
}

Trajectory2 figure8_trajectory(double speed, double radius, double rate_hz) {
    if (speed <= 0.0 || radius <= 0.0) {
        throw std::invalid_argument("figure8_trajectory: speed and radius must be positive");
    }
    return sample_path(Fig8Path{speed, radius}, rate_hz);
}

AltSample sample_altimeter(double true_altitude, double roll, double pitch,
                           const AltimeterParams& params, Rng& rng, double timestamp) {
    AltSample s;
    s.timestamp = timestamp;
    double slant = (true_altitude - params.sensor_offset) /
                   (std::cos(roll) * std::cos(pitch));
    if (params.sigma > 0.0) {
        slant += rng.gaussian(0.0, params.sigma);
    }
    if (slant > params.range_max) {
        return s;  // beyond sensor reach, invalid
    }
    if (slant < params.range_min) {
        s.range = params.range_min;
        s.valid = true;
        s.saturated = true;
        return s;
    }
    s.range = slant;
    s.valid = true;
    return s;
}

GateDecision gate_scan(const LaserScan&, const ImuSample* imu, double threshold) {
    if (imu == nullptr) {
        return GateDecision::keep_no_imu;
    }
    if (std::abs(imu->roll) > threshold || std::abs(imu->pitch) > threshold) {
        return GateDecision::drop;
    }
    return GateDecision::keep;
}

bool is_known_scenario(const std::string& name) {
    return name == "rect_nominal" || name == "rect_fast" ||
           name == "fig8_nominal" || name == "fig8_fast";
}

ScenarioRecord simulate_scenario(const ScenarioConfig& config, const World& world) {
    if (!is_known_scenario(config.scenario)) {
        throw std::invalid_argument("unknown scenario: " + config.scenario);
    }
    const bool fast = config.scenario.ends_with("_fast");
    const bool fig8 = config.scenario.starts_with("fig8");
    const double speed = fast ? config.fast_speed : config.nominal_speed;

    LidarParams lidar = config.lidar;
    lidar.sigma = config.sigma;

    // Shared analytic evaluator so all streams use the exact path.
    RectPath rect(speed, config.rect_width, config.rect_height);
    Fig8Path eight{speed, config.fig8_radius};
    const double duration = fig8 ? eight.duration() : rect.duration();
    auto pose_at = [&](double t) { return fig8 ? eight.at(t) : rect.at(t); };

    auto altitude_at = [&](double t) {
        return config.base_altitude +
               config.altitude_amplitude * std::sin(2.0 * kPi * config.altitude_freq_hz * t);
    };
    auto roll_at = [&](double t) {
        return config.tilt_amplitude * std::sin(2.0 * kPi * 0.23 * t);
    };
    auto pitch_at = [&](double t) {
        return config.tilt_amplitude * std::sin(2.0 * kPi * 0.31 * t);
    };
    auto in_gap = [&](double t) {
        for (const auto& [lo, hi] : config.truth_gaps) {
            if (t >= lo && t <= hi) {
                return true;
            }
        }
        return false;
    };

    ScenarioRecord rec;
    rec.scenario = config.scenario;
    rec.world_name = world.name;
    rec.seed = config.seed;
    rec.sigma = config.sigma;

    const long n = static_cast<long>(std::floor(duration * config.truth_rate_hz + 1e-9));
    Pose3 held_truth;
    bool have_held = false;
    const int scan_every = static_cast<int>(std::lround(config.truth_rate_hz / lidar.rate_hz));

    long scan_index = 0;
    long alt_index = 0;
    for (long k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / config.truth_rate_hz;
        const Pose2 p = pose_at(t);
        const Pose3 truth(p.x, p.y, altitude_at(t), roll_at(t), pitch_at(t), p.yaw);

        // The vehicle keeps moving through a gap; only the recorded truth freezes.
        if (in_gap(t) && have_held) {
            rec.ground_truth.samples.push_back({t, held_truth});
        } else {
            rec.ground_truth.samples.push_back({t, truth});
            held_truth = truth;
            have_held = true;
        }

        if (k % config.imu_every == 0) {
            rec.imu.push_back({t, truth.roll, truth.pitch, truth.yaw});
        }
        if (k % config.alt_every == 0) {
            Rng rng(mix_seed(config.seed, kAltStream, static_cast<std::uint64_t>(alt_index)));
            rec.alt.push_back(sample_altimeter(truth.z, truth.roll, truth.pitch,
                                               config.altimeter, rng, t));
            ++alt_index;
        }
        if (k % scan_every == 0) {
            Rng rng(mix_seed(config.seed, kScanStream, static_cast<std::uint64_t>(scan_index)));
            rec.scans.push_back(generate_scan(world, p, lidar, rng, t));
            ++scan_index;
        }
    }
    return rec;
}

ScenarioRecord simulate_scenario(const ScenarioConfig& config) {
    World world;
    if (config.world == "lab") {
        world = make_lab_world();
    } else if (config.world == "tunnel") {
        world = make_tunnel_world();
    } else {
        world = load_world(config.world);
    }
    return simulate_scenario(config, world);
}

}  // namespace slamkit
