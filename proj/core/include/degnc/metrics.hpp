#ifndef DEGNC_METRICS_HPP
#define DEGNC_METRICS_HPP

#include <vector>

#include "degnc/pose_graph.hpp"

namespace degnc {

struct AteResult {
    double ate_pos = 0.0;      // RMSE of aligned positions, length units
    double ate_rot_deg = 0.0;  // RMSE of aligned heading errors, degrees
};

/// Aligns the estimate to the ground truth with the closed-form optimal
/// planar rigid transform, then reports position and rotation RMSE.
AteResult compute_ate(const TrajectoryEstimate& estimate,
                      const TrajectoryEstimate& ground_truth);

/// Mean absolute angle difference in degrees after removing the gauge
/// angle (circular mean of the per-vertex differences).
double compute_are_deg(const std::vector<double>& rotations_a,
                       const std::vector<double>& rotations_b);

struct ClassificationResult {
    double precision = 1.0;
    double recall = 1.0;
};

/// Precision/recall of outlier detection: rejected = loop closures absent
/// from the inlier set, positives = the injected set. Empty denominators
/// count as perfect.
ClassificationResult classify_outliers(const std::vector<int>& injected_edges,
                                       const std::vector<int>& all_loop_closures,
                                       const std::vector<int>& inlier_loop_closures);

}  // namespace degnc

#endif
