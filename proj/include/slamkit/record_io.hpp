// Scenario record serialization (JSON lines, one sample per line, streams
// interleaved by timestamp) and estimate CSV files. Numbers are written with
// fixed six-decimal formatting so outputs are byte-stable for a fixed seed.

#ifndef SLAMKIT_RECORD_IO_HPP
#define SLAMKIT_RECORD_IO_HPP

#include <string>

#include "slamkit/errors.hpp"
#include "slamkit/simulator.hpp"
#include "slamkit/trajectory.hpp"

namespace slamkit {

void write_record(const ScenarioRecord& record, const std::string& path);

/// Parse a record file. Schema violations and out-of-order timestamps raise
/// DataError naming the offending line.
ScenarioRecord read_record(const std::string& path);

/// Either a planar or a fused 6-DoF estimate series.
struct EstimateFile {
    bool has_altitude = false;
    Trajectory2 planar;
    Trajectory3 fused;
};

void write_estimate_csv(const Trajectory2& estimate, const std::string& path);
void write_estimate_csv(const Trajectory3& estimate, const std::string& path);
EstimateFile read_estimate_csv(const std::string& path);

}  // namespace slamkit

#endif  // SLAMKIT_RECORD_IO_HPP
