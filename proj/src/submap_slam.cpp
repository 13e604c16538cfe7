#include "slamkit/submap_slam.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "slamkit/hector_slam.hpp"

namespace slamkit {

namespace {

struct ConstraintTerms {
    Eigen::Vector3d residual;
    Eigen::Matrix3d j_submap;
    Eigen::Matrix3d j_node;
};

ConstraintTerms constraint_terms(const Pose2& submap_pose, const Pose2& node_pose,
                                 const Pose2& measured) {
    const double c = std::cos(submap_pose.yaw);
    const double s = std::sin(submap_pose.yaw);
    const double dx = node_pose.x - submap_pose.x;
    const double dy = node_pose.y - submap_pose.y;

    const Pose2 predicted = between(submap_pose, node_pose);
    ConstraintTerms t;
    t.residual = Eigen::Vector3d(predicted.x - measured.x,
                                 predicted.y - measured.y,
                                 angular_diff(predicted.yaw, measured.yaw));
    t.j_submap << -c, -s, -s * dx + c * dy,
                   s, -c, -c * dx - s * dy,
                   0.0, 0.0, -1.0;
    t.j_node << c, s, 0.0,
               -s, c, 0.0,
                0.0, 0.0, 1.0;
    return t;
}

void check_connected(const PoseGraph& graph) {
    const std::size_t n_nodes = graph.nodes.size();
    const std::size_t n_submaps = graph.submap_poses.size();
    const std::size_t total = n_nodes + n_submaps;
    if (total <= 1) {
        return;
    }
    std::vector<std::size_t> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& c : graph.constraints) {
        const std::size_t a = static_cast<std::size_t>(c.node_id);
        const std::size_t b = n_nodes + static_cast<std::size_t>(c.submap_id);
        parent[find(a)] = find(b);
    }
    const std::size_t root = find(0);
    for (std::size_t i = 0; i < total; ++i) {
        if (find(i) != root) {
            const std::string what =
                i < n_nodes ? "node " + std::to_string(graph.nodes[i].id)
                            : "submap " + std::to_string(i - n_nodes);
            throw std::runtime_error("pose graph disconnected: " + what +
                                     " unreachable from node 0");
        }
    }
}

}  // namespace

double pose_graph_cost(const PoseGraph& graph) {
    double cost = 0.0;
    for (const auto& c : graph.constraints) {
        const auto t = constraint_terms(graph.submap_poses[c.submap_id],
                                        graph.nodes[c.node_id].pose, c.relative);
        cost += c.weight[0] * t.residual.x() * t.residual.x() +
                c.weight[1] * t.residual.y() * t.residual.y() +
                c.weight[2] * t.residual.z() * t.residual.z();
    }
    return cost;
}

OptimizeResult optimize_pose_graph(PoseGraph& graph, int max_iterations, double epsilon) {
    OptimizeResult result;
    check_connected(graph);
    result.initial_cost = pose_graph_cost(graph);
    result.final_cost = result.initial_cost;

    // Node 0 is the gauge; everything else is free.
    const std::size_t n_free_nodes = graph.nodes.empty() ? 0 : graph.nodes.size() - 1;
    const std::size_t dim = 3 * (n_free_nodes + graph.submap_poses.size());
    if (dim == 0 || graph.constraints.empty()) {
        return result;
    }
    auto node_var = [&](int id) { return id == 0 ? -1 : 3 * (id - 1); };
    auto submap_var = [&](int id) {
        return static_cast<int>(3 * n_free_nodes) + 3 * id;
    };

    auto apply = [&](const Eigen::VectorXd& delta) {
        for (std::size_t i = 1; i < graph.nodes.size(); ++i) {
            const int v = node_var(static_cast<int>(i));
            auto& p = graph.nodes[i].pose;
            p = Pose2(p.x + delta[v], p.y + delta[v + 1], p.yaw + delta[v + 2]);
        }
        for (std::size_t s = 0; s < graph.submap_poses.size(); ++s) {
            const int v = submap_var(static_cast<int>(s));
            auto& p = graph.submap_poses[s];
            p = Pose2(p.x + delta[v], p.y + delta[v + 1], p.yaw + delta[v + 2]);
        }
    };

    double cost = result.initial_cost;
    for (int iter = 0; iter < max_iterations; ++iter) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);

        for (const auto& c : graph.constraints) {
            const auto t = constraint_terms(graph.submap_poses[c.submap_id],
                                            graph.nodes[c.node_id].pose, c.relative);
            const Eigen::Vector3d w(c.weight[0], c.weight[1], c.weight[2]);
            const Eigen::Matrix3d wj_s = w.asDiagonal() * t.j_submap;
            const Eigen::Matrix3d wj_n = w.asDiagonal() * t.j_node;

            const int vs = submap_var(c.submap_id);
            const int vn = node_var(c.node_id);

            h.block<3, 3>(vs, vs).noalias() += t.j_submap.transpose() * wj_s;
            g.segment<3>(vs).noalias() += t.j_submap.transpose() * (w.asDiagonal() * t.residual);
            if (vn >= 0) {
                h.block<3, 3>(vn, vn).noalias() += t.j_node.transpose() * wj_n;
                g.segment<3>(vn).noalias() += t.j_node.transpose() * (w.asDiagonal() * t.residual);
                h.block<3, 3>(vs, vn).noalias() += t.j_submap.transpose() * wj_n;
                h.block<3, 3>(vn, vs).noalias() += t.j_node.transpose() * wj_s;
            }
        }

        h.diagonal().array() += 1e-12;
        Eigen::VectorXd delta = h.ldlt().solve(-g);
        if (!delta.allFinite()) {
            break;
        }

        // Backtrack if the step would increase the total weighted residual.
        PoseGraph saved = graph;
        apply(delta);
        double next = pose_graph_cost(graph);
        int halvings = 0;
        while (next > cost && halvings < 10) {
            graph = saved;
            delta /= 2.0;
            apply(delta);
            next = pose_graph_cost(graph);
            ++halvings;
        }
        if (next > cost) {
            graph = saved;
            break;
        }
        cost = next;
        ++result.iterations;
        if (delta.lpNorm<Eigen::Infinity>() < epsilon) {
            break;
        }
    }
    result.final_cost = cost;
    return result;
}

std::optional<CorrelativeResult> correlative_search(
    const Submap& submap, const LaserScan& scan, const Pose2& center_global,
    const CorrelativeWindow& window, double score_threshold, double occupied_threshold) {
    const Pose2 center_local = between(submap.origin_global(), center_global);
    const GridSearchResult best = grid_correlative_search(submap.grid(), scan, center_local,
                                                          window, occupied_threshold);
    if (best.score < score_threshold) {
        return std::nullopt;
    }
    return CorrelativeResult{compose(submap.origin_global(), best.pose), best.score};
}

SubmapSlam::SubmapSlam(const SubmapSlamConfig& config) : config_(config) {
    config_.window.translation_step = config.window.translation_step > 0.0
                                          ? config.window.translation_step
                                          : config_.resolution;
}

Pose2 SubmapSlam::refine_against_active(const LaserScan& scan, const Pose2& init_local,
                                        bool& no_match) {
    no_match = false;
    if (scan.valid_count() < static_cast<std::size_t>(config_.min_valid_beams)) {
        no_match = true;
        return init_local;
    }
    const OccupancyGrid& grid = submaps_.back().grid();

    auto gn_refine = [&](Pose2 xi) {
        double current = scan_residual(grid, scan, xi);
        for (int iter = 0; iter < config_.match_max_iterations; ++iter) {
            const GaussNewtonResult step = gauss_newton_step(grid, scan, xi, config_.lambda);
            if (step.singular) {
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
                break;
            }
            xi = candidate;
            current = next;
            if (std::abs(delta.x) < config_.epsilon_xy &&
                std::abs(delta.y) < config_.epsilon_xy &&
                std::abs(delta.yaw) < config_.epsilon_yaw) {
                break;
            }
        }
        return std::pair<Pose2, double>(xi, current);
    };

    auto [xi, residual] = gn_refine(init_local);

    // Least squares alone has a narrow basin on a single-resolution grid; a
    // coarse correlative pre-alignment around the guess recovers a badly
    // aligned scan before refining again.
    if (residual > config_.realign_residual_gate) {
        CorrelativeWindow window;
        window.half_translation = config_.realign_half_translation;
        window.translation_step = config_.resolution;
        window.half_yaw = config_.realign_half_yaw;
        window.yaw_step = deg_to_rad(1.0);
        const GridSearchResult coarse = grid_correlative_search(
            grid, scan, init_local, window, config_.occupied_threshold);
        if (coarse.score > 0.0) {
            const auto [xi2, residual2] = gn_refine(coarse.pose);
            if (residual2 < residual) {
                xi = xi2;
                residual = residual2;
            }
        }
    }

    no_match = residual > 0.2;
    return xi;
}

void SubmapSlam::open_submap(const Pose2& origin_internal, const Pose2& recorded_pose) {
    submaps_.emplace_back(config_.resolution, config_.submap_extent, recorded_pose,
                          config_.finish_threshold);
    submap_origin_internal_.push_back(origin_internal);
    graph_.submap_poses.push_back(recorded_pose);
    submap_members_.emplace_back();
}

std::vector<PoseGraphConstraint> SubmapSlam::find_loop_closures(int node_id) const {
    std::vector<PoseGraphConstraint> out;
    const PoseGraphNode& node = graph_.nodes[node_id];
    const LaserScan* scan = node_id < static_cast<int>(node_scans_.size())
                                ? &node_scans_[node_id]
                                : nullptr;
    if (scan == nullptr) {
        return out;
    }
    for (std::size_t s = 0; s < submaps_.size(); ++s) {
        if (!submaps_[s].finished()) {
            continue;
        }
        const auto& members = node_memberships_[node_id];
        if (std::find(members.begin(), members.end(), static_cast<int>(s)) != members.end()) {
            continue;
        }
        const Pose2& submap_pose = graph_.submap_poses[s];
        if (norm(submap_pose.translation() - node.pose.translation()) > config_.closure_gate) {
            continue;
        }
        const auto hit = correlative_search(submaps_[s], *scan, node.pose, config_.window,
                                            config_.score_threshold,
                                            config_.occupied_threshold);
        if (hit) {
            PoseGraphConstraint c;
            c.submap_id = static_cast<int>(s);
            c.node_id = node_id;
            c.relative = between(submap_pose, hit->pose);
            c.weight = config_.closure_weight;
            c.is_loop = true;
            out.push_back(c);
        }
    }
    return out;
}

void SubmapSlam::closure_pass(int submap_id) {
    bool any = false;
    for (int node_id : submap_members_[submap_id]) {
        auto found = find_loop_closures(node_id);
        for (auto& c : found) {
            graph_.constraints.push_back(c);
            ++loop_closures_added_;
            any = true;
        }
    }
    if (any) {
        // Keep the submaps' recorded poses in sync with the optimized graph.
        optimize_pose_graph(graph_, config_.opt_max_iterations, config_.opt_epsilon);
        ++optimizations_run_;
        for (std::size_t s = 0; s < submaps_.size(); ++s) {
            submaps_[s].set_origin_global(graph_.submap_poses[s]);
        }
    }
}

Pose2 SubmapSlam::process_scan(const LaserScan& scan) {
    const long index = scan_index_++;

    if (submaps_.empty()) {
        internal_pose_ = Pose2();
        open_submap(Pose2(), Pose2());
        submaps_.back().insert_scan_local(Pose2(), scan);

        PoseGraphNode node{0, Pose2(), index, scan.timestamp};
        graph_.nodes.push_back(node);
        node_scans_.push_back(scan);
        node_memberships_.push_back({0});
        submap_members_[0].push_back(0);
        graph_.constraints.push_back({0, 0, Pose2(), config_.intra_weight, false});
        return node.pose;
    }

    // Front-end error accumulates with travel; it lands on submap openings.
    drift_accum_ = drift_accum_ + Vec2{std::cos(internal_pose_.yaw) * config_.drift_per_scan.x -
                                           std::sin(internal_pose_.yaw) * config_.drift_per_scan.y,
                                       std::sin(internal_pose_.yaw) * config_.drift_per_scan.x +
                                           std::cos(internal_pose_.yaw) * config_.drift_per_scan.y};

    const int active = static_cast<int>(submaps_.size()) - 1;
    const Pose2 init_internal =
        config_.cv_extrapolation ? compose(internal_pose_, internal_delta_) : internal_pose_;
    const Pose2 init_local = between(submap_origin_internal_[active], init_internal);
    bool no_match = false;
    const Pose2 local = refine_against_active(scan, init_local, no_match);
    last_match_failed_ = no_match;
    const Pose2 previous_internal = internal_pose_;
    internal_pose_ = compose(submap_origin_internal_[active], local);
    internal_delta_ = between(previous_internal, internal_pose_);

    submaps_[active].insert_scan_local(local, scan);

    const int node_id = static_cast<int>(graph_.nodes.size());
    const Pose2 recorded = compose(graph_.submap_poses[active], local);
    graph_.nodes.push_back({node_id, recorded, index, scan.timestamp});
    node_scans_.push_back(scan);
    node_memberships_.push_back({active});
    submap_members_[active].push_back(node_id);
    graph_.constraints.push_back({active, node_id, local,
                                  no_match ? config_.low_confidence_weight
                                           : config_.intra_weight,
                                  false});

    if (submaps_[active].finished()) {
        closure_pass(active);

        // Open the next submap at the current pose and seed it with this scan
        // so matching never starts against an empty grid; the accumulated
        // drift is baked into the new submap's recorded pose.
        const Pose2 node_now = graph_.nodes[node_id].pose;
        const Pose2 new_recorded(node_now.x + drift_accum_.x, node_now.y + drift_accum_.y,
                                 node_now.yaw);
        drift_accum_ = {0.0, 0.0};
        open_submap(internal_pose_, new_recorded);
        const int fresh = static_cast<int>(submaps_.size()) - 1;
        submaps_[fresh].insert_scan_local(Pose2(), scan);
        submap_members_[fresh].push_back(node_id);
        node_memberships_[node_id].push_back(fresh);
        graph_.constraints.push_back({fresh, node_id,
                                      between(new_recorded, node_now),
                                      config_.intra_weight, false});
    }

    return graph_.nodes[node_id].pose;
}

void SubmapSlam::finalize() {
    if (finalized_ || submaps_.empty()) {
        finalized_ = true;
        return;
    }
    const int active = static_cast<int>(submaps_.size()) - 1;
    if (!submaps_[active].finished()) {
        submaps_[active].finish();
    }
    closure_pass(active);
    finalized_ = true;
}

Trajectory2 SubmapSlam::node_trajectory() const {
    Trajectory2 out;
    for (const auto& n : graph_.nodes) {
        out.append(n.timestamp, n.pose);
    }
    return out;
}

void SubmapSlam::export_graph_json(const std::string& path) const {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : graph_.nodes) {
        j["nodes"].push_back({{"id", n.id},
                              {"t", n.timestamp},
                              {"x", n.pose.x},
                              {"y", n.pose.y},
                              {"yaw", n.pose.yaw}});
    }
    j["submaps"] = nlohmann::json::array();
    for (std::size_t s = 0; s < submaps_.size(); ++s) {
        j["submaps"].push_back({{"id", s},
                                {"x", graph_.submap_poses[s].x},
                                {"y", graph_.submap_poses[s].y},
                                {"yaw", graph_.submap_poses[s].yaw},
                                {"finished", submaps_[s].finished()},
                                {"scans", submaps_[s].scans_inserted()}});
    }
    j["constraints"] = nlohmann::json::array();
    for (const auto& c : graph_.constraints) {
        j["constraints"].push_back({{"submap", c.submap_id},
                                    {"node", c.node_id},
                                    {"dx", c.relative.x},
                                    {"dy", c.relative.y},
                                    {"dyaw", c.relative.yaw},
                                    {"wx", c.weight[0]},
                                    {"wy", c.weight[1]},
                                    {"wyaw", c.weight[2]},
                                    {"loop", c.is_loop}});
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << j.dump(2) << "\n";
}

}  // namespace slamkit
