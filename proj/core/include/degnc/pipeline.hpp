#ifndef DEGNC_PIPELINE_HPP
#define DEGNC_PIPELINE_HPP

#include <string>
#include <vector>

#include "degnc/gnc.hpp"
#include "degnc/pose_graph.hpp"
#include "degnc/regularization.hpp"

namespace degnc {

// 0.99 chi-square quantiles at 1 and 2 degrees of freedom, used as the
// default squared truncation thresholds for the rotation and translation
// stages (gates on r^2 with r chi distributed under the noise model).
constexpr double kChi2Inv99Dof1 = 6.6348966010212145;
constexpr double kChi2Inv99Dof2 = 9.2103403719761818;

struct PipelineConfig {
    double c1_squared = kChi2Inv99Dof1;
    double c2_squared = kChi2Inv99Dof2;
    double gnc_factor = 1.4;
};

struct StageTimings {
    double regularization_s = 0.0;
    double ara_s = 0.0;
    double ta_s = 0.0;
    double refine_s = 0.0;
};

struct PipelineReport {
    std::vector<int> inlier_loop_closures;  // edge indices into graph.edges
    TrajectoryEstimate estimate;
    std::vector<double> ara_rotations;      // theta from the ARA stage, for diagnostics
    GncResult ara;
    GncResult ta;
    double max_rounding_residual = 0.0;
    int refinement_iterations = 0;
    bool refinement_stalled = false;
    StageTimings timings;

    bool converged() const { return ara.converged && ta.converged; }
};

/// Decoupled robust planar PGO: regularize angles, GNC over the angle
/// problem, GNC over the translation problem with rotations fixed, then
/// Gauss-Newton refinement of the coupled cost on odometry + inliers.
/// A loop closure is an inlier when both stages keep its weight at 1.
PipelineReport degnc_laf(const PoseGraph& graph, const PipelineConfig& config = {});

struct RefineResult {
    TrajectoryEstimate estimate;
    int iterations = 0;
    bool stalled = false;
    double final_cost = 0.0;
};

/// Damped Gauss-Newton on the coupled cost
///   sum kappa * ||R_to - R_from * Rtilde||_F^2 + tau * ||t_to - t_from - R_from * ttilde||^2
/// over odometry plus the given loop-closure edge indices, pose 0 anchored.
/// Never returns an iterate costing more than the initialization.
RefineResult refine_gauss_newton(const PoseGraph& graph,
                                 const std::vector<int>& inlier_edges,
                                 const TrajectoryEstimate& init);

/// Coupled cost of the estimate over the edge subset (odometry + inliers).
double evaluate_pgo_cost(const PoseGraph& graph, const std::vector<int>& inlier_edges,
                         const TrajectoryEstimate& estimate);

/// Diagnostic TLS cost: odometry terms squared, loop-closure terms
/// truncated at c^2.
double evaluate_tls_pgo_cost(const PoseGraph& graph, const TrajectoryEstimate& estimate,
                             double c);

/// JSON serialization of the report (inlier ids, timings, traces,
/// convergence flags, estimate as VERTEX_SE2 records).
std::string report_to_json(const PipelineReport& report);

}  // namespace degnc

#endif
