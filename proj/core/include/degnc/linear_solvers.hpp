#ifndef DEGNC_LINEAR_SOLVERS_HPP
#define DEGNC_LINEAR_SOLVERS_HPP

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseCholesky>

#include "degnc/pose_graph.hpp"
#include "degnc/regularization.hpp"

namespace degnc {

/// Sparse weighted least squares over the reduced incidence structure of a
/// pose graph: rows are edges with residual x_to - x_from - b_e, vertex 0 is
/// eliminated (anchored at 0). The sparsity pattern is fixed at construction
/// and reused across refactorizations with different weights, so repeated
/// GNC inner solves only pay for the numeric factorization.
class IncidenceSolver {
  public:
    explicit IncidenceSolver(const PoseGraph& graph);

    /// Refactorizes the normal matrix A^T W A with the given per-edge
    /// weights (finite, >= 0; odometry weights must be > 0).
    void factorize(const std::vector<double>& edge_weights);

    /// Solves for the per-vertex unknowns (size num_vertices, entry 0 fixed
    /// at 0) given per-edge right-hand sides b. factorize() must have run.
    Eigen::VectorXd solve(const std::vector<double>& edge_rhs) const;

  private:
    const PoseGraph& graph_;
    int n_;  // unknowns = num_vertices - 1
    Eigen::SparseMatrix<double> normal_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    std::vector<double> weights_;
};

/// Minimizes sum_e w_e * kappa_e * (theta_to - theta_from + 2*pi*k_e -
/// dtheta_e)^2 with theta_0 = 0. Odometry edges always carry weight 1 (their
/// kappa is never down-weighted); loop_closure_weights is indexed in
/// loop_closure_indices() order.
std::vector<double> solve_angles(const PoseGraph& graph,
                                 const RegularizedAngles& reg,
                                 const std::vector<double>& loop_closure_weights);

/// Minimizes sum_e w_e * tau_e * ||t_to - t_from - R_from * dt_e||^2 with
/// t_0 = 0. The x and y axes decouple and share one factorization.
std::vector<Eigen::Vector2d> solve_translations(
    const PoseGraph& graph, const std::vector<Eigen::Matrix2d>& rotations,
    const std::vector<double>& loop_closure_weights);

/// Dense reference formulation used by the test oracles.
struct WeightedRow {
    std::vector<std::pair<int, double>> coeffs;  // (unknown index, coefficient)
    double rhs = 0.0;
    double weight = 1.0;
};

struct WeightedLinearSystem {
    int num_unknowns = 0;
    std::vector<WeightedRow> rows;
};

/// Minimizer via dense factorization of the explicitly formed normal
/// equations. Test-scale only (num_unknowns <= 200); throws on
/// rank-deficient systems.
Eigen::VectorXd dense_oracle_solve(const WeightedLinearSystem& system);

}  // namespace degnc

#endif
