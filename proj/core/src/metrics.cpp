#include "degnc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace degnc {

AteResult compute_ate(const TrajectoryEstimate& estimate,
                      const TrajectoryEstimate& ground_truth) {
    const int n = estimate.size();
    if (n != ground_truth.size() || n < 2) {
        throw std::invalid_argument("compute_ate: trajectory size mismatch");
    }

    // Closed-form optimal planar rigid alignment Q, q of the estimate onto
    // the ground truth.
    Eigen::Vector2d mean_est = Eigen::Vector2d::Zero();
    Eigen::Vector2d mean_gt = Eigen::Vector2d::Zero();
    for (int i = 0; i < n; ++i) {
        mean_est += estimate.t[i];
        mean_gt += ground_truth.t[i];
    }
    mean_est /= n;
    mean_gt /= n;

    Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
    for (int i = 0; i < n; ++i) {
        M += (ground_truth.t[i] - mean_gt) * (estimate.t[i] - mean_est).transpose();
    }
    const double phi = std::atan2(M(1, 0) - M(0, 1), M(0, 0) + M(1, 1));
    const Eigen::Matrix2d Q = rotation_from_angle(phi);
    const Eigen::Vector2d q = mean_gt - Q * mean_est;

    double pos_sq = 0.0, rot_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        pos_sq += (Q * estimate.t[i] + q - ground_truth.t[i]).squaredNorm();
        const double dth =
            canonicalize_angle(estimate.theta[i] + phi - ground_truth.theta[i]);
        rot_sq += dth * dth;
    }
    AteResult out;
    out.ate_pos = std::sqrt(pos_sq / n);
    out.ate_rot_deg = degrees(std::sqrt(rot_sq / n));
    return out;
}

double compute_are_deg(const std::vector<double>& rotations_a,
                       const std::vector<double>& rotations_b) {
    const std::size_t n = rotations_a.size();
    if (n != rotations_b.size() || n == 0) {
        throw std::invalid_argument("compute_are_deg: size mismatch");
    }
    // Gauge angle: circular mean of the per-vertex differences.
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = rotations_a[i] - rotations_b[i];
        s += std::sin(d);
        c += std::cos(d);
    }
    const double gauge = std::atan2(s, c);

    double sum_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_abs += std::abs(canonicalize_angle(rotations_a[i] - rotations_b[i] - gauge));
    }
    return degrees(sum_abs / static_cast<double>(n));
}

ClassificationResult classify_outliers(const std::vector<int>& injected_edges,
                                       const std::vector<int>& all_loop_closures,
                                       const std::vector<int>& inlier_loop_closures) {
    auto contains = [](const std::vector<int>& v, int x) {
        return std::find(v.begin(), v.end(), x) != v.end();
    };
    std::vector<int> rejected;
    for (int e : all_loop_closures) {
        if (!contains(inlier_loop_closures, e)) rejected.push_back(e);
    }
    int true_positives = 0;
    for (int e : rejected) {
        if (contains(injected_edges, e)) ++true_positives;
    }
    ClassificationResult out;
    out.recall = injected_edges.empty()
                     ? 1.0
                     : static_cast<double>(true_positives) / injected_edges.size();
    out.precision = rejected.empty()
                        ? 1.0
                        : static_cast<double>(true_positives) / rejected.size();
    return out;
}

}  // namespace degnc
