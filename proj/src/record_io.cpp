#include "slamkit/record_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace slamkit {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// Interleave streams by (timestamp, stream order): truth, imu, alt, scan.
struct Event {
    double t;
    int order;
    std::string line;
};

std::string scan_line(const LaserScan& s) {
    std::ostringstream out;
    out << "{\"type\":\"scan\",\"t\":" << fmt(s.timestamp)
        << ",\"angle_min\":" << fmt(s.angle_min)
        << ",\"angle_increment\":" << fmt(s.angle_increment)
        << ",\"range_min\":" << fmt(s.range_min)
        << ",\"range_max\":" << fmt(s.range_max) << ",\"ranges\":[";
    for (std::size_t i = 0; i < s.ranges.size(); ++i) {
        out << (i ? "," : "") << fmt(s.ranges[i]);
    }
    out << "],\"valid\":[";
    for (std::size_t i = 0; i < s.valid.size(); ++i) {
        out << (i ? "," : "") << (s.valid[i] ? 1 : 0);
    }
    out << "]}";
    return out.str();
}

}  // namespace

void write_record(const ScenarioRecord& record, const std::string& path) {
    std::vector<Event> events;
    events.reserve(record.ground_truth.size() + record.scans.size() + record.imu.size() +
                   record.alt.size());

    for (const auto& s : record.ground_truth.samples) {
        const auto& p = s.pose;
        events.push_back({s.t, 0,
                          "{\"type\":\"truth\",\"t\":" + fmt(s.t) + ",\"x\":" + fmt(p.x) +
                              ",\"y\":" + fmt(p.y) + ",\"z\":" + fmt(p.z) +
                              ",\"roll\":" + fmt(p.roll) + ",\"pitch\":" + fmt(p.pitch) +
                              ",\"yaw\":" + fmt(p.yaw) + "}"});
    }
    for (const auto& s : record.imu) {
        events.push_back({s.timestamp, 1,
                          "{\"type\":\"imu\",\"t\":" + fmt(s.timestamp) +
                              ",\"roll\":" + fmt(s.roll) + ",\"pitch\":" + fmt(s.pitch) +
                              ",\"yaw\":" + fmt(s.yaw) + "}"});
    }
    for (const auto& s : record.alt) {
        events.push_back({s.timestamp, 2,
                          "{\"type\":\"alt\",\"t\":" + fmt(s.timestamp) +
                              ",\"range\":" + fmt(s.range) +
                              ",\"valid\":" + (s.valid ? std::string("1") : std::string("0")) +
                              ",\"saturated\":" +
                              (s.saturated ? std::string("1") : std::string("0")) + "}"});
    }
    for (const auto& s : record.scans) {
        events.push_back({s.timestamp, 3, scan_line(s)});
    }

    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.t != b.t ? a.t < b.t : a.order < b.order;
    });

    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write record file: " + path);
    }
    out << "{\"type\":\"meta\",\"scenario\":\"" << record.scenario << "\",\"world\":\""
        << record.world_name << "\",\"seed\":" << record.seed
        << ",\"sigma\":" << fmt(record.sigma) << "}\n";
    for (const auto& e : events) {
        out << e.line << "\n";
    }
}

ScenarioRecord read_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("record file not found: " + path);
    }
    ScenarioRecord rec;
    std::string line;
    long line_no = 0;
    double last_t[4] = {-1.0, -1.0, -1.0, -1.0};  // truth, imu, alt, scan

    auto fail = [&](const std::string& msg) {
        throw DataError(path + ": line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(std::string("invalid JSON: ") + e.what());
        }
        const std::string type = j.value("type", "");
        try {
            if (type == "meta") {
                rec.scenario = j.value("scenario", "");
                rec.world_name = j.value("world", "");
                rec.seed = j.value("seed", 0ULL);
                rec.sigma = j.value("sigma", 0.0);
            } else if (type == "truth") {
                const double t = j.at("t").get<double>();
                if (t <= last_t[0]) {
                    fail("truth timestamps out of order");
                }
                last_t[0] = t;
                rec.ground_truth.samples.push_back(
                    {t, Pose3(j.at("x"), j.at("y"), j.at("z"), j.at("roll"), j.at("pitch"),
                              j.at("yaw"))});
            } else if (type == "imu") {
                const double t = j.at("t").get<double>();
                if (t <= last_t[1]) {
                    fail("imu timestamps out of order");
                }
                last_t[1] = t;
                rec.imu.push_back({t, j.at("roll"), j.at("pitch"), j.at("yaw")});
            } else if (type == "alt") {
                const double t = j.at("t").get<double>();
                if (t <= last_t[2]) {
                    fail("alt timestamps out of order");
                }
                last_t[2] = t;
                rec.alt.push_back({t, j.at("range"), j.at("valid").get<int>() != 0,
                                   j.at("saturated").get<int>() != 0});
            } else if (type == "scan") {
                const double t = j.at("t").get<double>();
                if (t <= last_t[3]) {
                    fail("scan timestamps out of order");
                }
                last_t[3] = t;
                LaserScan s;
                s.timestamp = t;
                s.angle_min = j.at("angle_min");
                s.angle_increment = j.at("angle_increment");
                s.range_min = j.at("range_min");
                s.range_max = j.at("range_max");
                s.ranges = j.at("ranges").get<std::vector<double>>();
                for (int v : j.at("valid").get<std::vector<int>>()) {
                    s.valid.push_back(v != 0);
                }
                if (s.ranges.size() != s.valid.size()) {
                    fail("ranges/valid length mismatch");
                }
                if (s.angle_increment <= 0.0) {
                    fail("angle_increment must be positive");
                }
                const long expected = std::lround(2.0 * kPi / s.angle_increment);
                if (expected != static_cast<long>(s.ranges.size())) {
                    fail("beam count does not match angle_increment");
                }
                for (std::size_t i = 0; i < s.ranges.size(); ++i) {
                    if (s.valid[i] &&
                        (s.ranges[i] < s.range_min - 1e-9 || s.ranges[i] > s.range_max + 1e-9)) {
                        fail("valid beam range outside [range_min, range_max]");
                    }
                }
                rec.scans.push_back(std::move(s));
            } else {
                fail("unknown record type: '" + type + "'");
            }
        } catch (const json::exception& e) {
            fail(std::string("schema violation: ") + e.what());
        }
    }
    if (rec.ground_truth.empty()) {
        throw DataError(path + ": record has no ground-truth samples");
    }
    if (rec.scans.empty()) {
        throw DataError(path + ": record has no scans");
    }
    return rec;
}

void write_estimate_csv(const Trajectory2& estimate, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write estimate file: " + path);
    }
    out << "t,x,y,yaw\n";
    for (const auto& s : estimate.samples) {
        out << fmt(s.t) << "," << fmt(s.pose.x) << "," << fmt(s.pose.y) << ","
            << fmt(s.pose.yaw) << "\n";
    }
}

void write_estimate_csv(const Trajectory3& estimate, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write estimate file: " + path);
    }
    out << "t,x,y,yaw,z,roll,pitch\n";
    for (const auto& s : estimate.samples) {
        out << fmt(s.t) << "," << fmt(s.pose.x) << "," << fmt(s.pose.y) << ","
            << fmt(s.pose.yaw) << "," << fmt(s.pose.z) << "," << fmt(s.pose.roll) << ","
            << fmt(s.pose.pitch) << "\n";
    }
}

EstimateFile read_estimate_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("estimate file not found: " + path);
    }
    EstimateFile out;
    std::string line;
    long line_no = 0;

    if (!std::getline(in, line)) {
        throw DataError(path + ": empty estimate file");
    }
    ++line_no;
    if (line == "t,x,y,yaw") {
        out.has_altitude = false;
    } else if (line == "t,x,y,yaw,z,roll,pitch") {
        out.has_altitude = true;
    } else {
        throw DataError(path + ": line 1: unrecognized header '" + line + "'");
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<double> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                f.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataError(path + ": line " + std::to_string(line_no) +
                                ": bad number '" + cell + "'");
            }
        }
        const std::size_t expected = out.has_altitude ? 7 : 4;
        if (f.size() != expected) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": expected " +
                            std::to_string(expected) + " columns, got " +
                            std::to_string(f.size()));
        }
        try {
            if (out.has_altitude) {
                out.fused.append(f[0], Pose3(f[1], f[2], f[4], f[5], f[6], f[3]));
            } else {
                out.planar.append(f[0], Pose2(f[1], f[2], f[3]));
            }
        } catch (const std::invalid_argument& e) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!out.has_altitude && out.planar.empty()) {
        throw DataError(path + ": estimate file has no rows");
    }
    if (out.has_altitude && out.fused.empty()) {
        throw DataError(path + ": estimate file has no rows");
    }
    return out;
}

}  // namespace slamkit
