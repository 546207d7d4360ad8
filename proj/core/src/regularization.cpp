#include "degnc/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace degnc {

RegularizedAngles compute_regularization(const PoseGraph& graph) {
    validate_pose_graph(graph);
    const int n = graph.num_vertices;
    const int num_edges = static_cast<int>(graph.edges.size());

    // Unwrapped tree angles: prefix[m] = sum of odometry dtheta over (l, l+1), l < m.
    std::vector<double> prefix(n, 0.0);
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::Odometry) {
            prefix[e.to] = e.dtheta;  // filled below once all edges are seen
        }
    }
    for (int m = 1; m < n; ++m) {
        prefix[m] += prefix[m - 1];
    }

    RegularizedAngles reg;
    reg.k.assign(num_edges, 0);
    reg.residual_before_round.assign(num_edges, 0.0);

    for (int e = 0; e < num_edges; ++e) {
        const auto& edge = graph.edges[e];
        if (edge.kind != EdgeKind::LoopClosure) continue;
        const double path_sum = prefix[edge.to] - prefix[edge.from];
        const double v = (edge.dtheta - path_sum) / kTwoPi;
        const int k = static_cast<int>(std::llround(v));  // half away from zero
        reg.k[e] = k;
        reg.residual_before_round[e] = v;
        const double dist = std::abs(v - k);
        reg.max_rounding_residual = std::max(reg.max_rounding_residual, dist);
        if (std::abs(dist - 0.5) < 1e-9) {
            reg.ambiguous_edges.push_back(e);
        }
    }
    return reg;
}

}  // namespace degnc
