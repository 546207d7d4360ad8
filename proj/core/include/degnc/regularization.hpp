#ifndef DEGNC_REGULARIZATION_HPP
#define DEGNC_REGULARIZATION_HPP

#include <vector>

#include "degnc/pose_graph.hpp"

namespace degnc {

/// Integer regularization variables, one per edge (tree edges fixed at 0),
/// that align wrapped angle measurements with unwrapped angle unknowns.
struct RegularizedAngles {
    std::vector<int> k;                          // per edge index
    std::vector<double> residual_before_round;   // pre-rounding value, per edge
    double max_rounding_residual = 0.0;          // max |residual - k| over loop closures
    std::vector<int> ambiguous_edges;            // |residual - k| within 1e-9 of 0.5
};

/// Computes k for every loop closure from the fundamental cycles of the
/// odometry spanning tree: with tree prefix sums S, k_e rounds
/// (dtheta_e - (S_j - S_i)) / 2pi to the nearest integer (half away from
/// zero). Odometry edges get k = 0.
RegularizedAngles compute_regularization(const PoseGraph& graph);

}  // namespace degnc

#endif
