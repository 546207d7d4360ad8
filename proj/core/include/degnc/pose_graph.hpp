#ifndef DEGNC_POSE_GRAPH_HPP
#define DEGNC_POSE_GRAPH_HPP

#include <vector>

#include <Eigen/Core>

#include "degnc/angle.hpp"

namespace degnc {

enum class EdgeKind { Odometry, LoopClosure };

/// A relative-pose measurement between two vertices, with the isotropic
/// noise parameters kappa (rotation concentration) and tau (translation
/// precision). dtheta is stored canonicalized in (-pi, +pi].
struct RelativeMeasurement {
    int from = 0;
    int to = 0;
    double dtheta = 0.0;
    Eigen::Vector2d dt = Eigen::Vector2d::Zero();
    double kappa = 1.0;
    double tau = 1.0;
    EdgeKind kind = EdgeKind::Odometry;
};

/// Planar pose graph. Odometry edges must form the chain (i, i+1) for
/// i = 0..n-2; all other edges are loop closures. Vertex 0 is the anchor.
struct PoseGraph {
    int num_vertices = 0;
    std::vector<RelativeMeasurement> edges;

    static constexpr int kAnchor = 0;

    std::vector<int> loop_closure_indices() const {
        std::vector<int> out;
        for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
            if (edges[e].kind == EdgeKind::LoopClosure) out.push_back(e);
        }
        return out;
    }

    int num_loop_closures() const {
        int n = 0;
        for (const auto& e : edges) {
            if (e.kind == EdgeKind::LoopClosure) ++n;
        }
        return n;
    }
};

/// Per-vertex pose estimate with the gauge fixed at vertex 0
/// (theta[0] = 0, t[0] = origin).
struct TrajectoryEstimate {
    std::vector<double> theta;
    std::vector<Eigen::Vector2d> t;

    int size() const { return static_cast<int>(theta.size()); }
};

/// Throws std::invalid_argument if the graph violates its invariants
/// (odometry not a chain, out-of-range endpoints, non-positive kappa/tau).
void validate_pose_graph(const PoseGraph& graph);

}  // namespace degnc

#endif
