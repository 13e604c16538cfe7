#include "slamkit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "slamkit/fusion.hpp"
#include "slamkit/hector_slam.hpp"
#include "slamkit/rbpf_slam.hpp"
#include "slamkit/submap_slam.hpp"

namespace slamkit {

namespace fs = std::filesystem;

namespace {

constexpr double kScanPeriod = 0.1;

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

template <typename T, typename GetT>
const T* nearest_sample(const std::vector<T>& samples, double t, double tolerance,
                        GetT get_time) {
    const T* best = nullptr;
    double best_dt = tolerance;
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [&](const T& s, double tt) { return get_time(s) < tt; });
    if (it != samples.end()) {
        const double dt = std::abs(get_time(*it) - t);
        if (dt <= best_dt) {
            best_dt = dt;
            best = &*it;
        }
    }
    if (it != samples.begin()) {
        const T& prev = *std::prev(it);
        const double dt = std::abs(get_time(prev) - t);
        if (dt <= best_dt) {
            best_dt = dt;
            best = &prev;
        }
    }
    return best;
}

World world_for(const RunConfig& config) {
    if (config.world == "lab") {
        return make_lab_world();
    }
    if (config.world == "tunnel") {
        return make_tunnel_world();
    }
    try {
        return load_world(config.world);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::string mode_name(RmseMode mode) {
    return mode == RmseMode::error_norm ? "error_norm" : "literal_diff";
}

void write_pairs_csv_2d(const std::vector<AlignedPair2>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    out << "t,truth_x,truth_y,truth_yaw,est_x,est_y,est_yaw,displacement,stale\n";
    for (const auto& p : pairs) {
        out << fmt6(p.t) << "," << fmt6(p.truth.x) << "," << fmt6(p.truth.y) << ","
            << fmt6(p.truth.yaw) << "," << fmt6(p.estimate.x) << "," << fmt6(p.estimate.y)
            << "," << fmt6(p.estimate.yaw) << "," << fmt6(displacement2(p.truth, p.estimate))
            << "," << (p.stale ? 1 : 0) << "\n";
    }
}

void write_pairs_csv_3d(const std::vector<AlignedPair3>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    out << "t,truth_x,truth_y,truth_z,truth_yaw,est_x,est_y,est_z,est_yaw,displacement,stale\n";
    for (const auto& p : pairs) {
        out << fmt6(p.t) << "," << fmt6(p.truth.x) << "," << fmt6(p.truth.y) << ","
            << fmt6(p.truth.z) << "," << fmt6(p.truth.yaw) << "," << fmt6(p.estimate.x) << ","
            << fmt6(p.estimate.y) << "," << fmt6(p.estimate.z) << "," << fmt6(p.estimate.yaw)
            << "," << fmt6(displacement3(p.truth, p.estimate)) << "," << (p.stale ? 1 : 0)
            << "\n";
    }
}

// Owns the algorithm state so a single pass can produce both the estimate
// trajectory and the final map.
struct PipelineRunner {
    explicit PipelineRunner(const RunConfig& config)
        : config(config), rbpf(make_rbpf_config(config)) {}

    static RbpfConfig make_rbpf_config(const RunConfig& config) {
        RbpfConfig rc;
        rc.seed = config.seed;
        return rc;
    }

    PipelineResult run(const ScenarioRecord& record) {
        PipelineResult result;
        struct FusionExtras {
            double z, roll, pitch;
        };
        std::vector<FusionExtras> extras;

        for (const auto& scan : record.scans) {
            const ImuSample* imu = nearest_sample(
                record.imu, scan.timestamp, kScanPeriod,
                [](const ImuSample& s) { return s.timestamp; });
            const GateDecision gate = gate_scan(scan, imu, config.gate_threshold);
            if (gate == GateDecision::drop) {
                ++result.scans_dropped;
                continue;
            }
            if (gate == GateDecision::keep_no_imu) {
                ++result.scans_without_imu;
            }

            Pose2 pose;
            if (config.algorithm == "hector") {
                pose = hector.process_scan(scan);
            } else if (config.algorithm == "rbpf") {
                pose = rbpf.process_scan(scan);
            } else {
                pose = submap.process_scan(scan);
            }
            ++result.scans_processed;
            result.estimate.append(scan.timestamp, pose);

            if (config.fusion) {
                const AltSample* alt = nearest_sample(
                    record.alt, scan.timestamp, kScanPeriod,
                    [](const AltSample& s) { return s.timestamp; });
                const ImuSample imu_used =
                    imu ? *imu : ImuSample{scan.timestamp, 0.0, 0.0, pose.yaw};
                const AltSample alt_used =
                    alt ? *alt : AltSample{scan.timestamp, 0.0, false, false};
                const FusedPose fused = fuser.fuse(pose, alt_used, imu_used);
                extras.push_back({fused.pose.z, fused.pose.roll, fused.pose.pitch});
            }
        }

        if (config.algorithm == "submap") {
            submap.finalize();
            result.estimate = submap.node_trajectory();  // post-optimization poses
        }

        if (config.fusion) {
            result.has_fused = true;
            for (std::size_t i = 0; i < result.estimate.samples.size(); ++i) {
                const auto& s = result.estimate.samples[i];
                const auto& e = extras[i];
                result.fused.append(
                    s.t, Pose3(s.pose.x, s.pose.y, e.z, e.roll, e.pitch, s.pose.yaw));
            }
        }
        return result;
    }

    void export_map(const std::string& pgm, const std::string& meta) const {
        if (config.algorithm == "hector") {
            hector.pyramid().finest().export_pgm(pgm, meta);
            return;
        }
        if (config.algorithm == "rbpf") {
            std::size_t best = 0;
            for (std::size_t i = 1; i < rbpf.particles().size(); ++i) {
                if (rbpf.particles()[i].weight > rbpf.particles()[best].weight) {
                    best = i;
                }
            }
            rbpf.particles()[best].map.export_pgm(pgm, meta);
            return;
        }
        // Stitch the submaps into one global grid.
        OccupancyGrid global = OccupancyGrid::centered(0.05, {0.0, 0.0}, 24.0, 24.0);
        for (std::size_t s = 0; s < submap.submaps().size(); ++s) {
            const auto& grid = submap.submaps()[s].grid();
            const Pose2& pose = submap.graph().submap_poses[s];
            for (int iy = 0; iy < grid.height(); ++iy) {
                for (int ix = 0; ix < grid.width(); ++ix) {
                    const double l = grid.log_odds(ix, iy);
                    if (std::abs(l) < 1e-6) {
                        continue;
                    }
                    const Vec2 world = pose.transform(grid.map_to_world(ix, iy));
                    const MapCoords mc = global.world_to_map(world);
                    global.update_cell(static_cast<int>(std::lround(mc.mx)),
                                       static_cast<int>(std::lround(mc.my)),
                                       l > 0.0 ? CellObservation::hit
                                               : CellObservation::miss);
                }
            }
        }
        global.export_pgm(pgm, meta);
    }

    RunConfig config;
    HectorSlam hector;
    RbpfSlam rbpf;
    SubmapSlam submap;
    AltitudeFuser fuser;
};

}  // namespace

void validate(const RunConfig& config) {
    if (!is_known_scenario(config.scenario)) {
        throw ConfigError("unknown scenario: " + config.scenario);
    }
    if (config.algorithm != "hector" && config.algorithm != "rbpf" &&
        config.algorithm != "submap") {
        throw ConfigError("unknown algorithm: " + config.algorithm);
    }
    if (config.sigma < 0.0) {
        throw ConfigError("sigma must be non-negative");
    }
    if (config.world != "lab" && config.world != "tunnel" && !fs::exists(config.world)) {
        throw ConfigError("world file not found: " + config.world);
    }
}

ScenarioRecord make_record(const RunConfig& config) {
    ScenarioConfig sc;
    sc.scenario = config.scenario;
    sc.world = config.world;
    sc.seed = config.seed;
    sc.sigma = config.sigma;
    sc.truth_gaps = config.truth_gaps;
    return simulate_scenario(sc, world_for(config));
}

void simulate_to_file(const RunConfig& config, const std::string& record_path) {
    validate(config);
    write_record(make_record(config), record_path);
}

PipelineResult run_pipeline(const RunConfig& config, const ScenarioRecord& record) {
    validate(config);
    PipelineRunner runner(config);
    return runner.run(record);
}

RunOutputs run_to_files(const RunConfig& config, const ScenarioRecord& record) {
    validate(config);
    fs::create_directories(config.out_dir);
    const fs::path dir(config.out_dir);

    PipelineRunner runner(config);
    const PipelineResult result = runner.run(record);

    RunOutputs outputs;
    outputs.estimate_csv = (dir / "estimate.csv").string();
    if (result.has_fused) {
        write_estimate_csv(result.fused, outputs.estimate_csv);
    } else {
        write_estimate_csv(result.estimate, outputs.estimate_csv);
    }

    outputs.map_pgm = (dir / "map.pgm").string();
    outputs.map_meta = (dir / "map.meta.txt").string();
    runner.export_map(outputs.map_pgm, outputs.map_meta);

    if (config.algorithm == "submap") {
        outputs.graph_json = (dir / "pose_graph.json").string();
        runner.submap.export_graph_json(outputs.graph_json);
    }
    return outputs;
}

ScenarioEval evaluate_estimate(const ScenarioRecord& record, const EstimateFile& estimate,
                               RmseMode mode) {
    ScenarioEval eval;
    eval.mode = mode;
    eval.three_d = estimate.has_altitude;

    const Trajectory2 truth2 = planar(record.ground_truth);
    if (estimate.has_altitude) {
        const auto pairs = align(record.ground_truth, estimate.fused);
        eval.rmse_cm = rmse_cm(pairs, mode);
        eval.yaw_rmse_deg = yaw_rmse_deg(pairs);
        eval.pair_count = pairs.size();
        eval.stale_count = std::count_if(pairs.begin(), pairs.end(),
                                         [](const AlignedPair3& p) { return p.stale; });
    } else {
        const auto pairs = align(truth2, estimate.planar);
        eval.rmse_cm = rmse_cm(pairs, mode);
        eval.yaw_rmse_deg = yaw_rmse_deg(pairs);
        eval.pair_count = pairs.size();
        eval.stale_count = std::count_if(pairs.begin(), pairs.end(),
                                         [](const AlignedPair2& p) { return p.stale; });
    }

    const Trajectory2 est2 =
        estimate.has_altitude ? planar(estimate.fused) : estimate.planar;
    const double t0 = std::max(truth2.start_time(), est2.start_time());
    const double t1 = std::min(truth2.end_time(), est2.end_time());
    const std::size_t n =
        t1 > t0 ? static_cast<std::size_t>(std::floor((t1 - t0) / kScanPeriod)) + 1 : 0;
    if (n >= 4) {
        const auto ty = yaw_series(truth2, t0, kScanPeriod, n);
        const auto ey = yaw_series(est2, t0, kScanPeriod, n);
        eval.delay = estimate_delay(ty, ey, kScanPeriod, 2.0);
    }
    return eval;
}

std::string format_eval_table(const std::string& scenario, const std::string& algorithm,
                              const ScenarioEval& eval) {
    std::ostringstream out;
    out << "scenario        algorithm  rmse_cm  yaw_rmse_deg  delay_s  pairs  stale\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-15s %-9s %8s %13s %8s %6zu %6zu\n",
                  scenario.c_str(), algorithm.c_str(), fmt2(eval.rmse_cm).c_str(),
                  fmt2(eval.yaw_rmse_deg).c_str(),
                  eval.delay.defined ? fmt2(eval.delay.seconds).c_str() : "n/a",
                  eval.pair_count, eval.stale_count);
    out << line;
    out << "mode: " << mode_name(eval.mode) << (eval.three_d ? " (3D)" : " (2D)") << "\n";
    return out.str();
}

EvalOutputs evaluate_to_files(const std::string& record_path, const std::string& estimate_path,
                              RmseMode mode, const std::string& out_dir) {
    const ScenarioRecord record = read_record(record_path);
    const EstimateFile estimate = read_estimate_csv(estimate_path);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    EvalOutputs outputs;
    outputs.eval = evaluate_estimate(record, estimate, mode);

    outputs.pairs_csv = (dir / "pairs.csv").string();
    if (estimate.has_altitude) {
        write_pairs_csv_3d(align(record.ground_truth, estimate.fused), outputs.pairs_csv);
    } else {
        write_pairs_csv_2d(align(planar(record.ground_truth), estimate.planar),
                           outputs.pairs_csv);
    }

    nlohmann::json j;
    j["scenario"] = record.scenario;
    j["mode"] = mode_name(mode);
    j["rmse_cm"] = outputs.eval.rmse_cm;
    j["yaw_rmse_deg"] = outputs.eval.yaw_rmse_deg;
    if (outputs.eval.delay.defined) {
        j["delay_s"] = outputs.eval.delay.seconds;
    } else {
        j["delay_s"] = nullptr;
    }
    j["pairs"] = outputs.eval.pair_count;
    j["stale_pairs"] = outputs.eval.stale_count;
    j["three_d"] = outputs.eval.three_d;

    outputs.report_json = (dir / "report.json").string();
    std::ofstream jf(outputs.report_json);
    jf << j.dump(2) << "\n";

    outputs.report_txt = (dir / "report.txt").string();
    std::ofstream tf(outputs.report_txt);
    tf << format_eval_table(record.scenario, "-", outputs.eval);
    return outputs;
}

const std::vector<std::string>& bench_scenarios() {
    static const std::vector<std::string> s = {"rect_nominal", "fig8_nominal", "rect_fast",
                                               "fig8_fast"};
    return s;
}

const std::vector<std::string>& bench_algorithms() {
    static const std::vector<std::string> a = {"hector", "rbpf", "submap"};
    return a;
}

BenchResult bench(std::uint64_t seed, double sigma, const std::string& out_dir, int jobs) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    fs::create_directories(dir / "records");

    // One record per scenario, shared by all algorithms.
    std::map<std::string, ScenarioRecord> records;
    for (const auto& scenario : bench_scenarios()) {
        RunConfig rc;
        rc.scenario = scenario;
        rc.seed = seed;
        rc.sigma = sigma;
        records[scenario] = make_record(rc);
        write_record(records.at(scenario),
                     (dir / "records" / (scenario + ".jsonl")).string());
    }

    struct Cell {
        std::string scenario;
        std::string algorithm;
    };
    std::vector<Cell> cells;
    for (const auto& algo : bench_algorithms()) {
        for (const auto& scenario : bench_scenarios()) {
            cells.push_back({scenario, algo});
        }
    }

    const int workers =
        jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<ScenarioEval> evals(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) {
                return;
            }
            const auto& cell = cells[i];
            RunConfig rc;
            rc.scenario = cell.scenario;
            rc.algorithm = cell.algorithm;
            rc.seed = seed;
            rc.sigma = sigma;
            rc.out_dir = (dir / (cell.scenario + "_" + cell.algorithm)).string();
            const RunOutputs run = run_to_files(rc, records.at(cell.scenario));
            const EstimateFile estimate = read_estimate_csv(run.estimate_csv);
            evals[i] = evaluate_estimate(records.at(cell.scenario), estimate,
                                         RmseMode::error_norm);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min<int>(workers, static_cast<int>(cells.size())); ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }

    BenchResult result;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        result.cells[cells[i].algorithm][cells[i].scenario] = evals[i];
    }

    std::ostringstream table;
    table << "RMSE values in cm (mode: error_norm)\n";
    char header[200];
    std::snprintf(header, sizeof(header), "%-10s %14s %14s %14s %14s %10s\n", "approach",
                  "rect_nominal", "fig8_nominal", "rect_fast", "fig8_fast", "average");
    table << header;
    nlohmann::json j;
    j["sigma"] = sigma;
    j["seed"] = seed;
    for (const auto& algo : bench_algorithms()) {
        double sum = 0.0;
        std::map<std::string, double> row;
        for (const auto& scenario : bench_scenarios()) {
            const double v = result.cells[algo][scenario].rmse_cm;
            row[scenario] = v;
            sum += v;
        }
        const double avg = sum / static_cast<double>(bench_scenarios().size());
        result.average_rmse_cm[algo] = avg;
        char line[200];
        std::snprintf(line, sizeof(line), "%-10s %14s %14s %14s %14s %10s\n", algo.c_str(),
                      fmt2(row["rect_nominal"]).c_str(), fmt2(row["fig8_nominal"]).c_str(),
                      fmt2(row["rect_fast"]).c_str(), fmt2(row["fig8_fast"]).c_str(),
                      fmt2(avg).c_str());
        table << line;
        j["rmse_cm"][algo] = row;
        j["average_cm"][algo] = avg;
    }

    result.report_txt = (dir / "bench_report.txt").string();
    std::ofstream tf(result.report_txt);
    tf << table.str();
    result.report_json = (dir / "bench_report.json").string();
    std::ofstream jf(result.report_json);
    jf << j.dump(2) << "\n";
    return result;
}

}  // namespace slamkit
