// slamkit command line: simulate scenario records, run the SLAM pipelines,
// evaluate estimates against ground truth, and run the full benchmark matrix.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 evaluation error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slamkit/runner.hpp"

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("SLAMKIT_OUT");
    return env != nullptr ? env : ".";
}

std::vector<std::pair<double, double>> parse_gaps(const std::vector<std::string>& specs) {
    std::vector<std::pair<double, double>> gaps;
    for (const auto& g : specs) {
        const auto colon = g.find(':');
        if (colon == std::string::npos) {
            throw slamkit::ConfigError("gap must be start:end, got '" + g + "'");
        }
        const double lo = std::stod(g.substr(0, colon));
        const double hi = std::stod(g.substr(colon + 1));
        if (hi <= lo) {
            throw slamkit::ConfigError("gap end must be after start: '" + g + "'");
        }
        gaps.emplace_back(lo, hi);
    }
    return gaps;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slamkit: 2D laser SLAM toolkit and simulation benchmark"};
    app.require_subcommand(1);

    std::string scenario = "rect_nominal";
    std::string world = "lab";
    std::string algorithm = "hector";
    std::uint64_t seed = 1;
    double sigma = 0.02;
    bool fusion = false;
    std::string mode = "error_norm";
    std::string out_dir = default_out_dir();
    std::string record_path;
    std::string estimate_path;
    std::vector<std::string> gap_specs;
    int jobs = 0;

    auto* sim = app.add_subcommand("simulate", "generate a scenario record (JSON lines)");
    sim->add_option("--scenario", scenario,
                    "rect_nominal|rect_fast|fig8_nominal|fig8_fast");
    sim->add_option("--world", world, "lab|tunnel|<world json file>");
    sim->add_option("--seed", seed, "deterministic seed");
    sim->add_option("--sigma", sigma, "lidar range noise sigma, meters");
    sim->add_option("--gap", gap_specs, "truth dropout interval start:end (repeatable)");
    sim->add_option("--out", record_path, "record file path")->required();

    auto* run = app.add_subcommand("run", "run a SLAM pipeline over a record");
    run->add_option("--record", record_path, "scenario record file")->required();
    run->add_option("--algo", algorithm, "hector|rbpf|submap");
    run->add_option("--seed", seed, "seed for the particle filter");
    run->add_flag("--fusion", fusion, "fuse altimeter and IMU into 6-DoF output");
    run->add_option("--out", out_dir, "output directory");

    auto* eval = app.add_subcommand("eval", "evaluate an estimate against a record");
    eval->add_option("--record", record_path, "scenario record file")->required();
    eval->add_option("--estimate", estimate_path, "estimate CSV file")->required();
    eval->add_option("--mode", mode, "error_norm|literal_diff");
    eval->add_option("--out", out_dir, "output directory");

    auto* bench = app.add_subcommand("bench", "full scenario x algorithm benchmark");
    bench->add_option("--seed", seed, "deterministic seed");
    bench->add_option("--sigma", sigma, "lidar range noise sigma, meters");
    bench->add_option("--jobs", jobs, "worker pool size (default: hardware)");
    bench->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            slamkit::RunConfig config;
            config.scenario = scenario;
            config.world = world;
            config.seed = seed;
            config.sigma = sigma;
            config.truth_gaps = parse_gaps(gap_specs);
            slamkit::simulate_to_file(config, record_path);
            std::cout << "wrote " << record_path << "\n";
        } else if (run->parsed()) {
            slamkit::RunConfig config;
            config.algorithm = algorithm;
            config.seed = seed;
            config.fusion = fusion;
            config.out_dir = out_dir;
            const slamkit::ScenarioRecord record = slamkit::read_record(record_path);
            config.scenario = record.scenario;
            const auto outputs = slamkit::run_to_files(config, record);
            std::cout << "wrote " << outputs.estimate_csv << "\n";
            std::cout << "wrote " << outputs.map_pgm << "\n";
            if (!outputs.graph_json.empty()) {
                std::cout << "wrote " << outputs.graph_json << "\n";
            }
        } else if (eval->parsed()) {
            slamkit::RmseMode rmse_mode;
            if (mode == "error_norm") {
                rmse_mode = slamkit::RmseMode::error_norm;
            } else if (mode == "literal_diff") {
                rmse_mode = slamkit::RmseMode::literal_diff;
            } else {
                throw slamkit::ConfigError("unknown mode: " + mode);
            }
            const auto outputs =
                slamkit::evaluate_to_files(record_path, estimate_path, rmse_mode, out_dir);
            std::cout << slamkit::format_eval_table("-", "-", outputs.eval);
            std::cout << "wrote " << outputs.report_json << "\n";
        } else if (bench->parsed()) {
            const auto result = slamkit::bench(seed, sigma, out_dir, jobs);
            std::ifstream table(result.report_txt);
            std::cout << table.rdbuf();
        }
    } catch (const slamkit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const slamkit::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const slamkit::EvalError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
