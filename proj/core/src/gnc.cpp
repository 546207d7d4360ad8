#include "degnc/gnc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace degnc {

double gnc_weight_update(double r_squared, double c_squared, double mu) {
    if (!(r_squared >= 0.0) || !(c_squared > 0.0) || !(mu > 0.0) ||
        !std::isfinite(r_squared) || !std::isfinite(c_squared) || !std::isfinite(mu)) {
        throw std::invalid_argument("gnc_weight_update: bad arguments");
    }
    const double lower = mu / (mu + 1.0) * c_squared;
    const double upper = (mu + 1.0) / mu * c_squared;
    if (r_squared <= lower) return 1.0;
    if (r_squared >= upper) return 0.0;
    // Middle branch; r > 0 here since lower > 0.
    const double w = std::sqrt(c_squared * mu * (mu + 1.0) / r_squared) - mu;
    return std::clamp(w, 0.0, 1.0);
}

double gnc_initialize_mu(const std::vector<double>& residuals_squared,
                         double c_squared) {
    if (residuals_squared.empty()) {
        throw std::invalid_argument("gnc_initialize_mu: no residuals");
    }
    const double max_r2 =
        *std::max_element(residuals_squared.begin(), residuals_squared.end());
    double mu0;
    if (2.0 * max_r2 > c_squared) {
        mu0 = c_squared / (2.0 * max_r2 - c_squared);
    } else {
        mu0 = 1e-4;  // all residuals already near-inlier
    }
    return std::max(mu0, 1e-8);
}

namespace {

// Surrogate penalty over loop closures at fixed mu:
// sum w * r^2 + mu * (1 - w) / (mu + w) * c^2.
double surrogate_cost(const std::vector<double>& weights,
                      const std::vector<double>& r2, double c_squared, double mu) {
    double cost = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double w = weights[i];
        cost += w * r2[i] + mu * (1.0 - w) / (mu + w) * c_squared;
    }
    return cost;
}

bool all_binary(const std::vector<double>& weights, double tol) {
    for (double w : weights) {
        if (std::min(w, 1.0 - w) > tol) return false;
    }
    return true;
}

int count_inliers(const std::vector<double>& weights) {
    int n = 0;
    for (double w : weights) {
        if (w > 0.5) ++n;
    }
    return n;
}

}  // namespace

GncResult gnc_solve(int num_loop_closures, const WeightedSolveFn& weighted_solve,
                    const ResidualsSquaredFn& residuals_squared,
                    const GncConfig& config) {
    if (!(config.continuation_factor > 1.0) || !(config.c_squared > 0.0)) {
        throw std::invalid_argument("gnc_solve: need f > 1 and c^2 > 0");
    }

    GncResult result;
    result.weights.assign(num_loop_closures, 1.0);
    result.solution = weighted_solve(result.weights);  // all-ones initialization

    if (num_loop_closures == 0) {
        result.converged = true;
        return result;
    }

    std::vector<double> r2 = residuals_squared(result.solution);
    if (static_cast<int>(r2.size()) != num_loop_closures) {
        throw std::invalid_argument("gnc_solve: residual count mismatch");
    }
    double mu = gnc_initialize_mu(r2, config.c_squared);

    int stall_count = 0;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        std::vector<double> prev_weights = result.weights;
        for (int i = 0; i < num_loop_closures; ++i) {
            result.weights[i] = gnc_weight_update(r2[i], config.c_squared, mu);
        }

        GncIterationStats stats;
        stats.iteration = iter;
        stats.mu = mu;
        stats.cost_after_weight_update =
            surrogate_cost(result.weights, r2, config.c_squared, mu);

        result.solution = weighted_solve(result.weights);
        r2 = residuals_squared(result.solution);
        stats.cost = surrogate_cost(result.weights, r2, config.c_squared, mu);
        stats.num_inlier_weights = count_inliers(result.weights);
        result.trace.push_back(stats);

        double max_dw = 0.0;
        for (int i = 0; i < num_loop_closures; ++i) {
            max_dw = std::max(max_dw, std::abs(result.weights[i] - prev_weights[i]));
        }

        // Converged only at a near-binary fixed point: weights both settled
        // and within tolerance of {0, 1}.  The binary test alone can fire
        // spuriously on the very first continuation step, where a small mu
        // pushes every weight close to zero before any re-solve has happened.
        if (all_binary(result.weights, config.weight_binary_tol) &&
            max_dw <= config.weight_binary_tol) {
            result.converged = true;
            break;
        }

        if (max_dw < 1e-6) {
            if (++stall_count >= 5) break;  // stalled while non-binary
        } else {
            stall_count = 0;
        }

        mu *= config.continuation_factor;
    }

    // Snap to an exact inlier/outlier partition.
    for (double& w : result.weights) {
        w = (w > 0.5) ? 1.0 : 0.0;
    }
    return result;
}

void write_gnc_trace_csv(std::ostream& out,
                         const std::vector<GncIterationStats>& trace) {
    out << "iteration,mu,cost,num_inlier_weights\n";
    for (const auto& s : trace) {
        out << s.iteration << ',' << s.mu << ',' << s.cost << ','
            << s.num_inlier_weights << '\n';
    }
}

}  // namespace degnc
