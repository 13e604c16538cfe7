#include "slamkit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slamkit {

namespace {

bool same_pose(const Pose2& a, const Pose2& b) {
    return a.x == b.x && a.y == b.y && a.yaw == b.yaw;
}

bool same_pose(const Pose3& a, const Pose3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z &&
           a.roll == b.roll && a.pitch == b.pitch && a.yaw == b.yaw;
}

Pose2 lerp_pose(const Pose2& a, const Pose2& b, double u) {
    return Pose2(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y),
                 a.yaw + u * angular_diff(b.yaw, a.yaw));
}

Pose3 lerp_pose(const Pose3& a, const Pose3& b, double u) {
    return Pose3(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y), a.z + u * (b.z - a.z),
                 a.roll + u * angular_diff(b.roll, a.roll),
                 a.pitch + u * angular_diff(b.pitch, a.pitch),
                 a.yaw + u * angular_diff(b.yaw, a.yaw));
}

template <typename PoseT>
std::vector<AlignedPair<PoseT>> align_impl(const TrajectoryT<PoseT>& truth,
                                           const TrajectoryT<PoseT>& estimate,
                                           double stale_window) {
    if (truth.empty() || estimate.empty()) {
        throw EvalError("align: empty trajectory");
    }
    if (estimate.end_time() < truth.start_time() || estimate.start_time() > truth.end_time()) {
        throw EvalError("align: trajectories do not overlap in time");
    }

    const auto& ts = truth.samples;
    const std::size_t n = ts.size();

    // Maximal runs of consecutive identical truth poses, for stale detection.
    std::vector<std::size_t> run_start(n), run_end(n);
    for (std::size_t i = 0; i < n; ++i) {
        run_start[i] = (i > 0 && same_pose(ts[i].pose, ts[i - 1].pose)) ? run_start[i - 1] : i;
    }
    for (std::size_t i = n; i-- > 0;) {
        run_end[i] = (i + 1 < n && same_pose(ts[i].pose, ts[i + 1].pose)) ? run_end[i + 1] : i;
    }

    std::vector<AlignedPair<PoseT>> pairs;
    pairs.reserve(estimate.samples.size());
    std::size_t i = 0;
    for (const auto& e : estimate.samples) {
        if (e.t < truth.start_time() || e.t > truth.end_time()) {
            continue;
        }
        while (i + 2 < n && ts[i + 1].t <= e.t) {
            ++i;
        }
        const double span = ts[i + 1].t - ts[i].t;
        const double u = span > 0.0 ? std::clamp((e.t - ts[i].t) / span, 0.0, 1.0) : 0.0;

        AlignedPair<PoseT> pair;
        pair.t = e.t;
        pair.truth = lerp_pose(ts[i].pose, ts[i + 1].pose, u);
        pair.estimate = e.pose;
        if (same_pose(ts[i].pose, ts[i + 1].pose)) {
            const double run_span = ts[run_end[i]].t - ts[run_start[i]].t;
            pair.stale = run_span > stale_window;
        }
        pairs.push_back(pair);
    }
    return pairs;
}

template <typename PairT, typename DispFn, typename OriginFn>
double rmse_cm_impl(const std::vector<PairT>& pairs, RmseMode mode, DispFn disp,
                    OriginFn origin_dist) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : pairs) {
        if (p.stale) {
            continue;
        }
        double d;
        if (mode == RmseMode::error_norm) {
            d = disp(p.truth, p.estimate);
        } else {
            d = origin_dist(p.truth) - origin_dist(p.estimate);
        }
        sum += d * d;
        ++n;
    }
    if (n == 0) {
        throw EvalError("rmse: no usable (non-stale) pairs");
    }
    return std::sqrt(sum / static_cast<double>(n)) * 100.0;
}

template <typename PairT>
double yaw_rmse_impl(const std::vector<PairT>& pairs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& p : pairs) {
        if (p.stale) {
            continue;
        }
        const double d = angular_diff(p.truth.yaw, p.estimate.yaw);
        sum += d * d;
        ++n;
    }
    if (n == 0) {
        throw EvalError("yaw_rmse: no usable (non-stale) pairs");
    }
    return rad_to_deg(std::sqrt(sum / static_cast<double>(n)));
}

}  // namespace

std::vector<AlignedPair2> align(const Trajectory2& truth, const Trajectory2& estimate,
                                double stale_window) {
    return align_impl(truth, estimate, stale_window);
}

std::vector<AlignedPair3> align(const Trajectory3& truth, const Trajectory3& estimate,
                                double stale_window) {
    return align_impl(truth, estimate, stale_window);
}

double displacement2(const Pose2& truth, const Pose2& estimate) {
    return std::hypot(truth.x - estimate.x, truth.y - estimate.y);
}

double displacement3(const Pose3& truth, const Pose3& estimate) {
    return std::sqrt((truth.x - estimate.x) * (truth.x - estimate.x) +
                     (truth.y - estimate.y) * (truth.y - estimate.y) +
                     (truth.z - estimate.z) * (truth.z - estimate.z));
}

double rmse_cm(const std::vector<AlignedPair2>& pairs, RmseMode mode) {
    return rmse_cm_impl(pairs, mode, displacement2,
                        [](const Pose2& p) { return std::hypot(p.x, p.y); });
}

double rmse_cm(const std::vector<AlignedPair3>& pairs, RmseMode mode) {
    return rmse_cm_impl(pairs, mode, displacement3, [](const Pose3& p) {
        return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    });
}

double yaw_rmse_deg(const std::vector<AlignedPair2>& pairs) { return yaw_rmse_impl(pairs); }
double yaw_rmse_deg(const std::vector<AlignedPair3>& pairs) { return yaw_rmse_impl(pairs); }

std::vector<double> unwrap_angles(const std::vector<double>& wrapped) {
    std::vector<double> out;
    out.reserve(wrapped.size());
    for (std::size_t i = 0; i < wrapped.size(); ++i) {
        if (i == 0) {
            out.push_back(wrapped[0]);
        } else {
            out.push_back(out.back() + angular_diff(wrapped[i], wrapped[i - 1]));
        }
    }
    return out;
}

std::vector<double> yaw_series(const Trajectory2& traj, double t0, double dt, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    const auto& s = traj.samples;
    std::size_t i = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        while (i + 2 < s.size() && s[i + 1].t <= t) {
            ++i;
        }
        const double span = s[i + 1].t - s[i].t;
        const double u = span > 0.0 ? std::clamp((t - s[i].t) / span, 0.0, 1.0) : 0.0;
        out.push_back(normalize_angle(s[i].pose.yaw +
                                      u * angular_diff(s[i + 1].pose.yaw, s[i].pose.yaw)));
    }
    return out;
}

DelayEstimate estimate_delay(const std::vector<double>& truth_yaw,
                             const std::vector<double>& estimate_yaw, double dt,
                             double max_lag) {
    DelayEstimate out;
    if (truth_yaw.size() != estimate_yaw.size() || truth_yaw.size() < 2 || dt <= 0.0) {
        return out;
    }
    const std::vector<double> a = unwrap_angles(truth_yaw);
    const std::vector<double> b = unwrap_angles(estimate_yaw);
    const std::size_t n = a.size();

    auto variance = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double var = 0.0;
        for (double x : v) {
            var += (x - mean) * (x - mean);
        }
        return var / v.size();
    };
    if (variance(a) < 1e-12 || variance(b) < 1e-12) {
        return out;  // flat series, delay undefined
    }

    const std::size_t max_lag_samples =
        std::min<std::size_t>(n - 2, static_cast<std::size_t>(std::lround(max_lag / dt)));
    double best_corr = -2.0;
    std::size_t best_lag = 0;
    for (std::size_t lag = 0; lag <= max_lag_samples; ++lag) {
        // estimate[i] is compared with truth[i - lag]
        double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
        const std::size_t m = n - lag;
        for (std::size_t i = lag; i < n; ++i) {
            const double x = a[i - lag];
            const double y = b[i];
            sa += x;
            sb += y;
            saa += x * x;
            sbb += y * y;
            sab += x * y;
        }
        const double cov = sab - sa * sb / m;
        const double va = saa - sa * sa / m;
        const double vb = sbb - sb * sb / m;
        if (va <= 0.0 || vb <= 0.0) {
            continue;
        }
        const double corr = cov / std::sqrt(va * vb);
        // prefer the smallest lag among effectively tied correlations
        if (corr > best_corr + 1e-12) {
            best_corr = corr;
            best_lag = lag;
        }
    }
    if (best_corr <= -2.0) {
        return out;
    }
    out.defined = true;
    out.seconds = static_cast<double>(best_lag) * dt;
    return out;
}

EvalReport aggregate(const std::map<std::string, double>& per_scenario_cm) {
    if (per_scenario_cm.empty()) {
        throw EvalError("aggregate: no scenarios");
    }
    EvalReport report;
    report.scenario_rmse_cm = per_scenario_cm;
    double sum = 0.0;
    for (const auto& [name, value] : per_scenario_cm) {
        sum += value;
    }
    report.average_rmse_cm = sum / static_cast<double>(per_scenario_cm.size());
    return report;
}

}  // namespace slamkit
