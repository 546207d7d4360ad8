#ifndef DEGNC_SYNTHETIC_HPP
#define DEGNC_SYNTHETIC_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "degnc/pose_graph.hpp"

namespace degnc {

struct GridLayout {
    int rows = 10;
    int cols = 10;
    double step = 1.0;
};

struct RandomWalkLayout {
    int n = 100;
    double step = 1.0;
};

struct SyntheticSpec {
    std::variant<GridLayout, RandomWalkLayout> layout = GridLayout{};
    double sigma_theta = 0.0;              // rad, odometry/loop rotation noise std
    double sigma_t = 0.0;                  // translation noise std per axis
    double loop_closure_probability = 0.2; // per candidate near-pair
    std::uint64_t rng_seed = 0;
};

struct SyntheticResult {
    PoseGraph graph;
    TrajectoryEstimate ground_truth;
};

/// Samples a pose graph from the generative measurement model: ground-truth
/// poses from the layout, odometry along the path, loop closures between
/// spatially near non-consecutive pose pairs (within 1.5 * step), rotation
/// noise Gaussian on the angle. kappa = 1/sigma_theta^2 and
/// tau = 1/sigma_t^2 (capped at 1e8 when sigma = 0). Deterministic per seed.
SyntheticResult generate_synthetic(const SyntheticSpec& spec);

struct InjectionSpec {
    double outlier_rate = 0.0;  // fraction of loop closures that are outliers after injection
    std::uint64_t rng_seed = 0;
};

struct InjectionResult {
    PoseGraph graph;
    std::vector<int> injected_edges;  // edge indices into graph.edges
};

/// Adds round(rate/(1-rate) * |loop closures|) random loop closures between
/// distinct non-consecutive pose pairs not already connected: dtheta uniform
/// on (-pi, pi], dt uniform in a box scaled to the dead-reckoned trajectory
/// extent, kappa/tau from the median of existing loop closures.
InjectionResult inject_outliers(const PoseGraph& graph, const InjectionSpec& spec);

}  // namespace degnc

#endif
