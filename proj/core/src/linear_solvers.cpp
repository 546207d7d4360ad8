#include "degnc/linear_solvers.hpp"

#include <stdexcept>

#include <Eigen/Dense>

namespace degnc {

IncidenceSolver::IncidenceSolver(const PoseGraph& graph)
    : graph_(graph), n_(graph.num_vertices - 1) {
    // Analyze the pattern once with unit weights; explicit zeros from
    // zero-weight edges keep the pattern stable across refactorizations.
    std::vector<double> ones(graph_.edges.size(), 1.0);
    factorize(ones);
    ldlt_.analyzePattern(normal_);
    ldlt_.factorize(normal_);
}

void IncidenceSolver::factorize(const std::vector<double>& edge_weights) {
    if (edge_weights.size() != graph_.edges.size()) {
        throw std::invalid_argument("IncidenceSolver: weight count mismatch");
    }
    weights_ = edge_weights;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(graph_.edges.size() * 4);
    for (std::size_t e = 0; e < graph_.edges.size(); ++e) {
        const double w = edge_weights[e];
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("IncidenceSolver: weights must be finite and >= 0");
        }
        const int i = graph_.edges[e].from - 1;  // anchored vertex 0 eliminated
        const int j = graph_.edges[e].to - 1;
        if (i >= 0) trips.emplace_back(i, i, w);
        if (j >= 0) trips.emplace_back(j, j, w);
        if (i >= 0 && j >= 0) {
            trips.emplace_back(i, j, -w);
            trips.emplace_back(j, i, -w);
        }
    }
    normal_.resize(n_, n_);
    normal_.setFromTriplets(trips.begin(), trips.end());

    if (ldlt_.rows() == normal_.rows()) {
        ldlt_.factorize(normal_);
        if (ldlt_.info() != Eigen::Success) {
            throw std::runtime_error("IncidenceSolver: factorization failed");
        }
    }
}

Eigen::VectorXd IncidenceSolver::solve(const std::vector<double>& edge_rhs) const {
    if (edge_rhs.size() != graph_.edges.size()) {
        throw std::invalid_argument("IncidenceSolver: rhs count mismatch");
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_);
    for (std::size_t e = 0; e < graph_.edges.size(); ++e) {
        const double wb = weights_[e] * edge_rhs[e];
        const int i = graph_.edges[e].from - 1;
        const int j = graph_.edges[e].to - 1;
        if (j >= 0) rhs[j] += wb;
        if (i >= 0) rhs[i] -= wb;
    }
    Eigen::VectorXd x = ldlt_.solve(rhs);
    Eigen::VectorXd full(n_ + 1);
    full[0] = 0.0;
    full.tail(n_) = x;
    return full;
}

namespace {

std::vector<double> effective_weights(const PoseGraph& graph,
                                      const std::vector<double>& lc_weights,
                                      bool rotational) {
    std::vector<double> w(graph.edges.size());
    std::size_t lc = 0;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        const double info = rotational ? edge.kappa : edge.tau;
        if (edge.kind == EdgeKind::Odometry) {
            w[e] = info;
        } else {
            if (lc == lc_weights.size()) {
                throw std::invalid_argument("loop closure weight count mismatch");
            }
            w[e] = lc_weights[lc++] * info;
        }
    }
    if (lc != lc_weights.size()) {
        throw std::invalid_argument("loop closure weight count mismatch");
    }
    return w;
}

}  // namespace

std::vector<double> solve_angles(const PoseGraph& graph, const RegularizedAngles& reg,
                                 const std::vector<double>& loop_closure_weights) {
    IncidenceSolver solver(graph);
    solver.factorize(effective_weights(graph, loop_closure_weights, /*rotational=*/true));
    std::vector<double> rhs(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        rhs[e] = graph.edges[e].dtheta - kTwoPi * reg.k[e];
    }
    Eigen::VectorXd theta = solver.solve(rhs);
    return {theta.data(), theta.data() + theta.size()};
}

std::vector<Eigen::Vector2d> solve_translations(
    const PoseGraph& graph, const std::vector<Eigen::Matrix2d>& rotations,
    const std::vector<double>& loop_closure_weights) {
    if (rotations.size() != static_cast<std::size_t>(graph.num_vertices)) {
        throw std::invalid_argument("solve_translations: rotation count mismatch");
    }
    IncidenceSolver solver(graph);
    solver.factorize(effective_weights(graph, loop_closure_weights, /*rotational=*/false));

    // x and y decouple and share the factorization.
    std::vector<double> rhs_x(graph.edges.size()), rhs_y(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        const Eigen::Vector2d b = rotations[edge.from] * edge.dt;
        rhs_x[e] = b.x();
        rhs_y[e] = b.y();
    }
    const Eigen::VectorXd tx = solver.solve(rhs_x);
    const Eigen::VectorXd ty = solver.solve(rhs_y);

    std::vector<Eigen::Vector2d> t(graph.num_vertices);
    for (int i = 0; i < graph.num_vertices; ++i) {
        t[i] = Eigen::Vector2d(tx[i], ty[i]);
    }
    return t;
}

Eigen::VectorXd dense_oracle_solve(const WeightedLinearSystem& system) {
    const int n = system.num_unknowns;
    if (n <= 0 || n > 200) {
        throw std::invalid_argument("dense_oracle_solve: num_unknowns out of range");
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<int>(system.rows.size()), n);
    Eigen::VectorXd b(static_cast<int>(system.rows.size()));
    for (int r = 0; r < static_cast<int>(system.rows.size()); ++r) {
        const auto& row = system.rows[r];
        const double sw = std::sqrt(row.weight);
        for (const auto& [idx, coef] : row.coeffs) {
            A(r, idx) += sw * coef;
        }
        b[r] = sw * row.rhs;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < n) {
        throw std::runtime_error("dense_oracle_solve: rank-deficient system");
    }
    return qr.solve(b);
}

}  // namespace degnc
