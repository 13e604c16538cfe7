// Acceptance suite: one check per shipped guarantee, one PASS/FAIL line
// each, non-zero exit if anything fails. Heavier closed-loop checks live
// here rather than in the unit suites.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "slamkit/evaluation.hpp"
#include "slamkit/fusion.hpp"
#include "slamkit/hector_slam.hpp"
#include "slamkit/random.hpp"
#include "slamkit/rbpf_slam.hpp"
#include "slamkit/record_io.hpp"
#include "slamkit/runner.hpp"
#include "slamkit/simulator.hpp"
#include "slamkit/submap_slam.hpp"

using namespace slamkit;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string id;
    std::string description;
    std::function<bool(std::string&)> run;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

ScenarioRecord record_for(const std::string& scenario, double sigma, std::uint64_t seed) {
    RunConfig rc;
    rc.scenario = scenario;
    rc.sigma = sigma;
    rc.seed = seed;
    return make_record(rc);
}

double closed_loop_rmse_cm(const std::string& scenario, const std::string& algorithm,
                           double sigma, std::uint64_t seed) {
    RunConfig rc;
    rc.scenario = scenario;
    rc.algorithm = algorithm;
    rc.sigma = sigma;
    rc.seed = seed;
    const ScenarioRecord rec = make_record(rc);
    const PipelineResult result = run_pipeline(rc, rec);
    return rmse_cm(align(planar(rec.ground_truth), result.estimate));
}

// ---- 1. published row averages ------------------------------------------

bool c1_aggregate(std::string& detail) {
    const EvalReport hector = aggregate({{"linear_nominal", 9.39},
                                         {"circular_nominal", 14.83},
                                         {"linear_fast", 11.47},
                                         {"circular_fast", 24.69}});
    const EvalReport cartographer = aggregate({{"linear_nominal", 16.70},
                                               {"circular_nominal", 14.94},
                                               {"linear_fast", 15.95},
                                               {"circular_fast", 24.56}});
    char buf[120];
    std::snprintf(buf, sizeof(buf), "averages %.4f and %.4f cm", hector.average_rmse_cm,
                  cartographer.average_rmse_cm);
    detail = buf;
    return std::abs(hector.average_rmse_cm - 15.09) <= 0.01 &&
           std::abs(cartographer.average_rmse_cm - 18.04) <= 0.01;
}

// ---- 2. altimeter effective range and blind zone -------------------------

bool c2_fusion(std::string& detail) {
    const FusionConfig config;
    const auto [lo, hi] = effective_range(config);
    bool ok = lo == 0.30 + 0.08 && hi == 12.0 + 0.08;

    AltitudeFuser fuser;
    Rng rng(2);
    for (int i = 0; i < 200 && ok; ++i) {
        AltSample saturated{0.0, 0.30, true, true};
        const FusedPose f = fuser.fuse(Pose2(), saturated,
                                       ImuSample{0.0, rng.uniform(-0.5, 0.5),
                                                 rng.uniform(-0.5, 0.5), 0.0});
        ok = f.pose.z == 0.38 && f.blind_zone;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "range (%.2f, %.2f), saturated z pinned to 0.38", lo, hi);
    detail = buf;
    return ok;
}

// ---- 3. interpolation gradient vs finite differences ----------------------

bool c3_gradient(std::string& detail) {
    Rng rng(33);
    OccupancyGrid grid(0.05, Pose2(), 40, 40);
    for (int iy = 0; iy < 40; ++iy) {
        for (int ix = 0; ix < 40; ++ix) {
            const int n = static_cast<int>(rng.uniform(0.0, 5.0));
            for (int k = 0; k < n; ++k) {
                grid.update_cell(ix, iy,
                                 rng.uniform() < 0.5 ? CellObservation::hit
                                                     : CellObservation::miss);
            }
        }
    }
    double worst = 0.0;
    int checked = 0;
    while (checked < 1000) {
        const double mx = std::floor(rng.uniform(0.0, 38.0)) + 0.05 + 0.9 * rng.uniform();
        const double my = std::floor(rng.uniform(0.0, 38.0)) + 0.05 + 0.9 * rng.uniform();
        const Interpolation m = grid.interpolate(mx, my);
        if (!m.in_bounds) {
            continue;
        }
        const auto [gx, gy] = oracles::fd_gradient(grid, mx, my);
        worst = std::max({worst, std::abs(m.dx - gx), std::abs(m.dy - gy)});
        ++checked;
    }
    char buf[80];
    std::snprintf(buf, sizeof(buf), "max abs gradient error %.2e over 1000 queries", worst);
    detail = buf;
    return worst < 1e-6;
}

// ---- 4. matcher vs correlative oracle -------------------------------------

bool c4_matcher_oracle(std::string& detail) {
    const World room = make_lab_world();
    LidarParams lp;
    lp.sigma = 0.0;
    lp.beam_count = 180;  // 2-degree beams keep the brute force affordable

    int agreements = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(mix_seed(404, trial));
        const Pose2 truth(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                          rng.uniform(-0.4, 0.4));

        HectorConfig config;
        config.map_extent = 14.0;
        HectorSlam slam(config);
        // build the map from a few poses around the truth
        for (int k = 0; k < 5; ++k) {
            const Pose2 p(truth.x + 0.06 * (k % 3 - 1), truth.y + 0.06 * (k / 3 - 1),
                          truth.yaw);
            Rng scan_rng(mix_seed(405, trial, k));
            slam.insert_scan_at(p, generate_scan(room, p, lp, scan_rng));
        }

        Rng probe_rng(mix_seed(406, trial));
        const LaserScan probe = generate_scan(room, truth, lp, probe_rng);

        // initial guess offset by up to (0.2 m, 10 deg)
        const double angle = rng.uniform(-kPi, kPi);
        const double dist = rng.uniform(0.0, 0.2);
        const Pose2 init(truth.x + dist * std::cos(angle), truth.y + dist * std::sin(angle),
                         truth.yaw + rng.uniform(-deg_to_rad(10.0), deg_to_rad(10.0)));

        slam.set_pose(init);
        const Pose2 matched = slam.match_scan(probe);

        const Pose2 oracle = oracles::correlative_minimum(
            slam.pyramid().finest(), probe, init, 0.22, 0.005, deg_to_rad(11.0),
            deg_to_rad(0.5));
        const bool agree =
            std::hypot(matched.x - oracle.x, matched.y - oracle.y) <= 0.02 &&
            std::abs(angular_diff(matched.yaw, oracle.yaw)) <= deg_to_rad(1.0);
        if (agree) {
            ++agreements;
        }
    }
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%d/%d trials agree within (2 cm, 1 deg)", agreements,
                  trials);
    detail = buf;
    return agreements >= 95;
}

// ---- 5. closed-loop bounds -------------------------------------------------

bool c5_closed_loop(std::string& detail) {
    const double noiseless = closed_loop_rmse_cm("rect_nominal", "hector", 0.0, 1);
    const double noisy = closed_loop_rmse_cm("rect_nominal", "hector", 0.02, 1);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "rect_nominal rmse %.2f cm (sigma 0), %.2f cm (sigma 2 cm)",
                  noiseless, noisy);
    detail = buf;
    return noiseless < 5.0 && noisy < 20.0;
}

// ---- 6. fast-speed ordering -------------------------------------------------

bool c6_ordering(std::string& detail) {
    std::ostringstream out;
    bool ok = true;
    for (const std::string scenario : {"rect_fast", "fig8_fast"}) {
        const double hector = closed_loop_rmse_cm(scenario, "hector", 0.02, 1);
        const double rbpf = closed_loop_rmse_cm(scenario, "rbpf", 0.02, 1);
        const double submap = closed_loop_rmse_cm(scenario, "submap", 0.02, 1);
        out << scenario << " hector " << hector << " rbpf " << rbpf << " submap " << submap
            << "; ";
        ok = ok && rbpf >= 2.0 * hector && hector <= submap + 5.0;
    }
    detail = out.str();
    return ok;
}

// ---- 7. rbpf invariants ------------------------------------------------------

bool c7_rbpf(std::string& detail) {
    const ScenarioRecord rec = record_for("fig8_nominal", 0.02, 1);
    RbpfConfig config;
    config.seed = 1;
    RbpfSlam slam(config);

    bool ok = true;
    Trajectory2 estimate;
    for (const auto& scan : rec.scans) {
        const double n_eff_before = slam.n_eff();
        const int updates_before = slam.updates_processed();
        const Pose2 p = slam.process_scan(scan);
        estimate.append(scan.timestamp, p);

        double sum = 0.0;
        for (const auto& particle : slam.particles()) {
            sum += particle.weight;
        }
        ok = ok && std::abs(sum - 1.0) < 1e-9;
        ok = ok && slam.n_eff() >= 1.0 - 1e-9 && slam.n_eff() <= 30.0 + 1e-9;

        // resampling fires exactly when the post-weighting n_eff is below 15
        if (slam.updates_processed() > updates_before && updates_before > 0) {
            const bool should = slam.n_eff_before_resample() < 15.0;
            ok = ok && slam.last_update_resampled() == should;
        }
        (void)n_eff_before;
    }

    EstimateFile est;
    est.has_altitude = false;
    est.planar = estimate;
    const ScenarioEval eval = evaluate_estimate(rec, est, RmseMode::error_norm);
    ok = ok && eval.delay.defined && eval.delay.seconds >= 0.1 - 1e-9;

    char buf[120];
    std::snprintf(buf, sizeof(buf), "invariants held; yaw delay %.2f s",
                  eval.delay.defined ? eval.delay.seconds : -1.0);
    detail = buf;
    return ok;
}

// ---- 8. graph optimizer vs dense solver --------------------------------------

bool c8_optimizer(std::string& detail) {
    std::mt19937_64 gen(808);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> noise(-0.08, 0.08);

    int matched = 0;
    const int seeds = 50;
    double worst = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
        const int n = 3 + static_cast<int>(gen() % 8);  // <= 10 poses
        PoseGraph g;
        g.submap_poses.push_back(Pose2(u(gen), u(gen), 0.3 * u(gen)));
        for (int i = 0; i < n; ++i) {
            g.nodes.push_back({i, Pose2(2.0 * u(gen), 2.0 * u(gen), 0.5 * u(gen)), i,
                               0.1 * i});
            Pose2 rel = between(g.submap_poses[0], g.nodes[i].pose);
            rel = Pose2(rel.x + 0.02 * noise(gen), rel.y + 0.02 * noise(gen),
                        rel.yaw + 0.02 * noise(gen));
            g.constraints.push_back({0, i, rel, {1e4, 1e4, 1e4}, false});
        }
        PoseGraphConstraint loop;
        loop.submap_id = 0;
        loop.node_id = n - 1;
        const Pose2 rel = between(g.submap_poses[0], g.nodes[n - 1].pose);
        loop.relative = Pose2(rel.x + noise(gen), rel.y + noise(gen), rel.yaw + noise(gen));
        loop.weight = {1e3, 1e3, 1e3};
        loop.is_loop = true;
        g.constraints.push_back(loop);

        PoseGraph mine = g;
        optimize_pose_graph(mine, 100, 1e-10);
        const PoseGraph oracle = oracles::dense_graph_solve(g);

        double err = 0.0;
        for (std::size_t i = 0; i < mine.nodes.size(); ++i) {
            err = std::max({err, std::abs(mine.nodes[i].pose.x - oracle.nodes[i].pose.x),
                            std::abs(mine.nodes[i].pose.y - oracle.nodes[i].pose.y),
                            std::abs(angular_diff(mine.nodes[i].pose.yaw,
                                                  oracle.nodes[i].pose.yaw))});
        }
        for (std::size_t s = 0; s < mine.submap_poses.size(); ++s) {
            err = std::max({err, std::abs(mine.submap_poses[s].x - oracle.submap_poses[s].x),
                            std::abs(mine.submap_poses[s].y - oracle.submap_poses[s].y),
                            std::abs(angular_diff(mine.submap_poses[s].yaw,
                                                  oracle.submap_poses[s].yaw))});
        }
        worst = std::max(worst, err);
        if (err < 1e-6) {
            ++matched;
        }
    }
    char buf[100];
    std::snprintf(buf, sizeof(buf), "%d/%d seeds matched; worst component error %.2e", matched,
                  seeds, worst);
    detail = buf;
    return matched == seeds;
}

// ---- 9. loop closure efficacy --------------------------------------------------

bool c9_loop_closure(std::string& detail) {
    const ScenarioRecord rec = record_for("fig8_nominal", 0.02, 1);
    SubmapSlamConfig config;
    config.drift_per_scan = {0.01, 0.0};
    SubmapSlam slam(config);

    Trajectory2 live;
    for (const auto& scan : rec.scans) {
        live.append(scan.timestamp, slam.process_scan(scan));
    }
    const Trajectory2 truth = planar(rec.ground_truth);
    const double pre = rmse_cm(align(truth, live));
    slam.finalize();
    const double post = rmse_cm(align(truth, slam.node_trajectory()));

    char buf[120];
    std::snprintf(buf, sizeof(buf), "pre %.2f cm, post %.2f cm, %d closures", pre, post,
                  slam.loop_closure_count());
    detail = buf;
    return slam.loop_closure_count() >= 1 && post <= 0.5 * pre;
}

// ---- 10. eval invariants --------------------------------------------------------

bool c10_eval(std::string& detail) {
    bool ok = true;

    // rmse = 0 iff every non-stale pair has zero displacement
    std::vector<AlignedPair2> zero = {{0.0, Pose2(1.0, 1.0, 0.0), Pose2(1.0, 1.0, 0.5), false}};
    ok = ok && rmse_cm(zero) == 0.0;
    std::vector<AlignedPair2> nonzero = {{0.0, Pose2(), Pose2(1e-4, 0.0, 0.0), false}};
    ok = ok && rmse_cm(nonzero) > 0.0;

    // rigid-translation invariance
    Rng rng(10);
    std::vector<AlignedPair2> pairs;
    std::vector<AlignedPair2> moved;
    for (int i = 0; i < 50; ++i) {
        const Pose2 t(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), 0.0);
        const Pose2 e(t.x + rng.uniform(-0.1, 0.1), t.y + rng.uniform(-0.1, 0.1), 0.0);
        pairs.push_back({0.1 * i, t, e, false});
        moved.push_back({0.1 * i, Pose2(t.x + 5.0, t.y - 2.0, 0.0),
                         Pose2(e.x + 5.0, e.y - 2.0, 0.0), false});
    }
    ok = ok && std::abs(rmse_cm(pairs) - rmse_cm(moved)) < 1e-9;

    // stale-pair exclusion
    std::vector<AlignedPair2> with_stale = pairs;
    for (std::size_t i = 0; i < with_stale.size(); i += 4) {
        with_stale[i].stale = true;
        with_stale[i].estimate = Pose2(99.0, 99.0, 0.0);
    }
    std::vector<AlignedPair2> excised;
    for (const auto& p : with_stale) {
        if (!p.stale) {
            excised.push_back(p);
        }
    }
    ok = ok && std::abs(rmse_cm(with_stale) - rmse_cm(excised)) < 1e-12;

    // exact shift recovery, and +-1 sample under 2-degree yaw noise, 100 trials
    int recovered = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        Rng trng(5000 + trial);
        std::vector<double> truth_yaw;
        for (int i = 0; i < 300; ++i) {
            truth_yaw.push_back(
                normalize_angle(std::sin(0.07 * i) + 0.4 * std::sin(0.011 * i + 0.3)));
        }
        const int shift = 1 + static_cast<int>(trng.uniform(0.0, 10.0));
        std::vector<double> est_yaw;
        for (int i = 0; i < 300; ++i) {
            est_yaw.push_back(normalize_angle(truth_yaw[std::max(0, i - shift)] +
                                              trng.gaussian(0.0, deg_to_rad(2.0))));
        }
        const DelayEstimate noisy = estimate_delay(truth_yaw, est_yaw, 0.1, 2.0);
        std::vector<double> clean_est;
        for (int i = 0; i < 300; ++i) {
            clean_est.push_back(truth_yaw[std::max(0, i - shift)]);
        }
        const DelayEstimate clean = estimate_delay(truth_yaw, clean_est, 0.1, 2.0);
        const bool exact = clean.defined && std::abs(clean.seconds - 0.1 * shift) < 1e-9;
        const bool within = noisy.defined && std::abs(noisy.seconds - 0.1 * shift) <= 0.1 + 1e-9;
        if (exact && within) {
            ++recovered;
        }
    }
    ok = ok && recovered == trials;

    char buf[100];
    std::snprintf(buf, sizeof(buf), "invariants held; delay recovered in %d/%d trials",
                  recovered, trials);
    detail = buf;
    return ok;
}

// ---- 11. end-to-end benchmark determinism ----------------------------------------

bool c11_bench(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir_a = fs::temp_directory_path() / "slamkit_acceptance_bench_a";
    const fs::path dir_b = fs::temp_directory_path() / "slamkit_acceptance_bench_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    bench(1, 0.02, dir_a.string());
    bench(1, 0.02, dir_b.string());
    const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();

    bool identical = true;
    std::size_t files = 0;
    for (auto it = fs::recursive_directory_iterator(dir_a);
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) {
            continue;
        }
        ++files;
        const fs::path rel = fs::relative(it->path(), dir_a);
        if (!fs::exists(dir_b / rel) || slurp(it->path().string()) !=
                                            slurp((dir_b / rel).string())) {
            identical = false;
            break;
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "two full runs in %llds, %zu files byte-identical: %s",
                  static_cast<long long>(elapsed), files, identical ? "yes" : "no");
    detail = buf;
    // generous margin under the half-hour budget on a small desktop
    return identical && files > 30 && elapsed < 1500;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"C01", "published per-approach averages reproduce", c1_aggregate},
        {"C02", "altimeter effective range and blind-zone floor", c2_fusion},
        {"C03", "interpolation gradient vs finite differences", c3_gradient},
        {"C04", "scan matcher vs exhaustive correlative oracle", c4_matcher_oracle},
        {"C05", "closed-loop rectangle error bounds", c5_closed_loop},
        {"C06", "fast-speed robustness ordering across approaches", c6_ordering},
        {"C07", "particle filter invariants and latency", c7_rbpf},
        {"C08", "pose-graph optimizer vs dense solver", c8_optimizer},
        {"C09", "loop closure halves the drift", c9_loop_closure},
        {"C10", "evaluation invariants and delay recovery", c10_eval},
        {"C11", "benchmark matrix determinism and runtime", c11_bench},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %s: %s (%s)\n", ok ? "PASS" : "FAIL", criterion.id.c_str(),
                    criterion.description.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!ok) {
            ++failures;
        }
    }
    if (failures > 0) {
        std::printf("%d criteria failed\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
