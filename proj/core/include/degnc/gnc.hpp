#ifndef DEGNC_GNC_HPP
#define DEGNC_GNC_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace degnc {

struct GncConfig {
    double c_squared = 1.0;           // TLS truncation threshold c^2
    double continuation_factor = 1.4; // f > 1
    int max_iterations = 100;
    double weight_binary_tol = 1e-3;
};

struct GncIterationStats {
    int iteration = 0;
    double mu = 0.0;
    double cost_after_weight_update = 0.0;  // surrogate, residuals at previous iterate
    double cost = 0.0;                      // surrogate after the re-solve
    int num_inlier_weights = 0;             // weights > 0.5
};

struct GncResult {
    Eigen::VectorXd solution;
    std::vector<double> weights;  // per loop closure, snapped to {0,1}
    bool converged = false;
    std::vector<GncIterationStats> trace;
};

/// Closed-form minimizer over w in [0,1] of
///   w * r^2 + mu * (1 - w) / (mu + w) * c^2.
double gnc_weight_update(double r_squared, double c_squared, double mu);

/// Initial convexity parameter: c^2 / (2 * max(r^2) - c^2) when the worst
/// residual exceeds c^2/2, a fixed 1e-4 otherwise; clamped to >= 1e-8.
double gnc_initialize_mu(const std::vector<double>& residuals_squared,
                         double c_squared);

using WeightedSolveFn =
    std::function<Eigen::VectorXd(const std::vector<double>& weights)>;
using ResidualsSquaredFn =
    std::function<std::vector<double>(const Eigen::VectorXd& solution)>;

/// Graduated non-convexity over a TLS cost with num_loop_closures robust
/// terms. weighted_solve must return the exact minimizer of the weighted
/// sum of squares; residuals_squared evaluates the per-loop-closure r^2 at
/// a solution. Alternates closed-form weight updates with weighted solves
/// while mu grows geometrically, until all weights are binary (within
/// weight_binary_tol) or the iteration/stall limits hit.
GncResult gnc_solve(int num_loop_closures, const WeightedSolveFn& weighted_solve,
                    const ResidualsSquaredFn& residuals_squared,
                    const GncConfig& config);

/// CSV trace rows: iteration,mu,cost,num_inlier_weights (with header).
void write_gnc_trace_csv(std::ostream& out, const std::vector<GncIterationStats>& trace);

}  // namespace degnc

#endif
