// Batch orchestration: generate scenario records, run a SLAM pipeline over a
// record (with optional altitude fusion), evaluate against the recorded
// ground truth, and run the full scenario-by-algorithm benchmark matrix.

#ifndef SLAMKIT_RUNNER_HPP
#define SLAMKIT_RUNNER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slamkit/errors.hpp"
#include "slamkit/evaluation.hpp"
#include "slamkit/record_io.hpp"
#include "slamkit/simulator.hpp"

namespace slamkit {

struct RunConfig {
    std::string scenario = "rect_nominal";  // rect_nominal|rect_fast|fig8_nominal|fig8_fast
    std::string world = "lab";              // lab|tunnel|<world json path>
    std::string algorithm = "hector";       // hector|rbpf|submap
    std::uint64_t seed = 1;
    double sigma = 0.02;
    bool fusion = false;
    RmseMode rmse_mode = RmseMode::error_norm;
    double gate_threshold = deg_to_rad(10.0);
    std::vector<std::pair<double, double>> truth_gaps;
    std::string out_dir = ".";
};

void validate(const RunConfig& config);

/// Build the scenario record for `config` in memory.
ScenarioRecord make_record(const RunConfig& config);

/// simulate: write the record file. Idempotent for a fixed (config, seed).
void simulate_to_file(const RunConfig& config, const std::string& record_path);

struct PipelineResult {
    Trajectory2 estimate;            // one sample per ungated scan
    Trajectory3 fused;               // filled when fusion is on
    bool has_fused = false;
    long scans_processed = 0;
    long scans_dropped = 0;
    long scans_without_imu = 0;
};

/// Run the chosen pipeline over a record, in timestamp order, gating scans
/// on IMU tilt. For the submap pipeline the returned estimate holds the
/// final (post-optimization) node poses.
PipelineResult run_pipeline(const RunConfig& config, const ScenarioRecord& record);

struct RunOutputs {
    std::string estimate_csv;
    std::string map_pgm;
    std::string map_meta;
    std::string graph_json;  // submap pipeline only
};

/// run: pipeline plus file outputs under config.out_dir.
RunOutputs run_to_files(const RunConfig& config, const ScenarioRecord& record);

struct ScenarioEval {
    double rmse_cm = 0.0;
    double yaw_rmse_deg = 0.0;
    DelayEstimate delay;
    std::size_t pair_count = 0;
    std::size_t stale_count = 0;
    RmseMode mode = RmseMode::error_norm;
    bool three_d = false;
};

ScenarioEval evaluate_estimate(const ScenarioRecord& record, const EstimateFile& estimate,
                               RmseMode mode);

/// eval: JSON + text report and the per-pair CSV, written under out_dir.
struct EvalOutputs {
    std::string report_json;
    std::string report_txt;
    std::string pairs_csv;
    ScenarioEval eval;
};

EvalOutputs evaluate_to_files(const std::string& record_path, const std::string& estimate_path,
                              RmseMode mode, const std::string& out_dir);

/// bench: the full 4-scenario x 3-algorithm matrix (cells run on a small
/// worker pool), per-cell outputs plus a combined table with per-approach
/// averages.
struct BenchResult {
    // algorithm -> scenario -> eval
    std::map<std::string, std::map<std::string, ScenarioEval>> cells;
    std::map<std::string, double> average_rmse_cm;
    std::string report_txt;
    std::string report_json;
};

BenchResult bench(std::uint64_t seed, double sigma, const std::string& out_dir,
                  int jobs = 0);

const std::vector<std::string>& bench_scenarios();
const std::vector<std::string>& bench_algorithms();

std::string format_eval_table(const std::string& scenario, const std::string& algorithm,
                              const ScenarioEval& eval);

}  // namespace slamkit

#endif  // SLAMKIT_RUNNER_HPP
