#include "degnc/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <json.hpp>

#include "degnc/linear_solvers.hpp"

namespace degnc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Eigen::Matrix2d> rotations_from_thetas(const std::vector<double>& theta) {
    std::vector<Eigen::Matrix2d> R(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        R[i] = rotation_from_angle(theta[i]);
    }
    return R;
}

// Squared coupled residual of one edge (Eq. of the MLE cost):
// kappa * ||R_to - R_from * Rtilde||_F^2 + tau * ||t_to - t_from - R_from * dt||^2.
double edge_pgo_r2(const RelativeMeasurement& e, const TrajectoryEstimate& est) {
    const double delta = est.theta[e.to] - est.theta[e.from] - e.dtheta;
    const double rot = e.kappa * (4.0 - 4.0 * std::cos(delta));
    const Eigen::Vector2d tres =
        est.t[e.to] - est.t[e.from] - rotation_from_angle(est.theta[e.from]) * e.dt;
    return rot + e.tau * tres.squaredNorm();
}

}  // namespace

double evaluate_pgo_cost(const PoseGraph& graph, const std::vector<int>& inlier_edges,
                         const TrajectoryEstimate& estimate) {
    double cost = 0.0;
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::Odometry) cost += edge_pgo_r2(e, estimate);
    }
    for (int idx : inlier_edges) {
        cost += edge_pgo_r2(graph.edges[idx], estimate);
    }
    return cost;
}

double evaluate_tls_pgo_cost(const PoseGraph& graph, const TrajectoryEstimate& estimate,
                             double c) {
    const double c2 = c * c;
    double cost = 0.0;
    for (const auto& e : graph.edges) {
        const double r2 = edge_pgo_r2(e, estimate);
        cost += (e.kind == EdgeKind::Odometry) ? r2 : std::min(r2, c2);
    }
    return cost;
}

RefineResult refine_gauss_newton(const PoseGraph& graph,
                                 const std::vector<int>& inlier_edges,
                                 const TrajectoryEstimate& init) {
    const int n = graph.num_vertices;
    if (init.size() != n) {
        throw std::invalid_argument("refine_gauss_newton: estimate size mismatch");
    }

    std::vector<const RelativeMeasurement*> active;
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::Odometry) active.push_back(&e);
    }
    for (int idx : inlier_edges) {
        active.push_back(&graph.edges[idx]);
    }

    // Unknowns: (theta_i, t_i) for i >= 1, pose 0 anchored.
    const int dim = 3 * (n - 1);
    auto var = [](int vertex) { return 3 * (vertex - 1); };

    TrajectoryEstimate current = init;
    double cost = evaluate_pgo_cost(graph, inlier_edges, current);

    RefineResult result;
    result.estimate = current;
    result.final_cost = cost;

    double lambda = 1e-6;
    constexpr int kMaxIterations = 100;
    constexpr double kRelTol = 1e-9;
    // Whitened residuals make the cost dimensionless with expectation ~1 per
    // residual at the noise level; far below that there is nothing left to
    // minimize but floating-point noise.
    const double cost_floor = 1e-10 * static_cast<double>(active.size());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool pattern_analyzed = false;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // Assemble J^T J and J^T r. Residual blocks per active edge:
        //   rot:   sqrt(2 kappa) * [cos th_j - cos(th_i + dth); sin th_j - sin(th_i + dth)]
        //   trans: sqrt(tau) * (t_j - t_i - R_i dt)
        std::vector<Eigen::Triplet<double>> trips;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
        for (const auto* ep : active) {
            const auto& e = *ep;
            const int i = e.from, j = e.to;
            const double thi = current.theta[i], thj = current.theta[j];

            const double s2k = std::sqrt(2.0 * e.kappa);
            Eigen::Vector2d r_rot(std::cos(thj) - std::cos(thi + e.dtheta),
                                  std::sin(thj) - std::sin(thi + e.dtheta));
            r_rot *= s2k;
            const Eigen::Vector2d drot_dthj =
                s2k * Eigen::Vector2d(-std::sin(thj), std::cos(thj));
            const Eigen::Vector2d drot_dthi =
                s2k * Eigen::Vector2d(std::sin(thi + e.dtheta), -std::cos(thi + e.dtheta));

            const double st = std::sqrt(e.tau);
            const Eigen::Matrix2d Ri = rotation_from_angle(thi);
            const Eigen::Vector2d rotated = Ri * e.dt;
            const Eigen::Vector2d r_tr = st * (current.t[j] - current.t[i] - rotated);
            // d(R_i dt)/dthi = [-sin -cos; cos -sin] * dt = perp(rotated)
            const Eigen::Vector2d dRdt_dthi(-rotated.y(), rotated.x());

            // Accumulate dense 6x6 block, then scatter.
            Eigen::Matrix<double, 4, 6> J = Eigen::Matrix<double, 4, 6>::Zero();
            Eigen::Vector4d r;
            r << r_rot, r_tr;
            // columns: [thi, ti_x, ti_y, thj, tj_x, tj_y]
            J.block<2, 1>(0, 0) = drot_dthi;
            J.block<2, 1>(0, 3) = drot_dthj;
            J.block<2, 1>(2, 0) = -st * dRdt_dthi;
            J.block<2, 2>(2, 1) = -st * Eigen::Matrix2d::Identity();
            J.block<2, 2>(2, 4) = st * Eigen::Matrix2d::Identity();

            const Eigen::Matrix<double, 6, 6> H = J.transpose() * J;
            const Eigen::Matrix<double, 6, 1> b = J.transpose() * r;

            int cols[6];
            cols[0] = (i > 0) ? var(i) : -1;
            cols[1] = (i > 0) ? var(i) + 1 : -1;
            cols[2] = (i > 0) ? var(i) + 2 : -1;
            cols[3] = (j > 0) ? var(j) : -1;
            cols[4] = (j > 0) ? var(j) + 1 : -1;
            cols[5] = (j > 0) ? var(j) + 2 : -1;
            for (int a = 0; a < 6; ++a) {
                if (cols[a] < 0) continue;
                g[cols[a]] -= b[a];
                for (int c = 0; c < 6; ++c) {
                    if (cols[c] < 0) continue;
                    trips.emplace_back(cols[a], cols[c], H(a, c));
                }
            }
        }

        Eigen::SparseMatrix<double> H(dim, dim);
        H.setFromTriplets(trips.begin(), trips.end());

        bool stepped = false;
        while (lambda < 1e12) {
            Eigen::SparseMatrix<double> Hd = H;
            for (int d = 0; d < dim; ++d) {
                Hd.coeffRef(d, d) *= (1.0 + lambda);
            }
            if (!pattern_analyzed) {
                ldlt.analyzePattern(Hd);
                pattern_analyzed = true;
            }
            ldlt.factorize(Hd);
            if (ldlt.info() != Eigen::Success) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd dx = ldlt.solve(g);

            TrajectoryEstimate trial = current;
            for (int v = 1; v < n; ++v) {
                trial.theta[v] += dx[var(v)];
                trial.t[v].x() += dx[var(v) + 1];
                trial.t[v].y() += dx[var(v) + 2];
            }
            const double trial_cost = evaluate_pgo_cost(graph, inlier_edges, trial);
            if (trial_cost <= cost) {
                const double rel_decrease = (cost - trial_cost) / std::max(cost, 1e-300);
                current = trial;
                cost = trial_cost;
                lambda = std::max(lambda / 10.0, 1e-12);
                stepped = true;
                result.iterations = iter + 1;
                if (cost <= cost_floor || rel_decrease < kRelTol) {
                    iter = kMaxIterations;  // converged
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            result.stalled = true;
            break;
        }
    }

    for (double& th : current.theta) th = canonicalize_angle(th);
    current.theta[0] = 0.0;
    result.estimate = current;
    result.final_cost = cost;
    return result;
}

PipelineReport degnc_laf(const PoseGraph& graph, const PipelineConfig& config) {
    validate_pose_graph(graph);
    PipelineReport report;

    auto t0 = Clock::now();
    const RegularizedAngles reg = compute_regularization(graph);
    report.max_rounding_residual = reg.max_rounding_residual;
    report.timings.regularization_s = seconds_since(t0);

    const std::vector<int> lc_indices = graph.loop_closure_indices();
    const int num_lc = static_cast<int>(lc_indices.size());

    // Stage 1: GNC over the regularized angle problem.
    t0 = Clock::now();
    IncidenceSolver angle_solver(graph);
    std::vector<double> angle_rhs(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        angle_rhs[e] = graph.edges[e].dtheta - kTwoPi * reg.k[e];
    }
    auto angle_weights = [&](const std::vector<double>& w) {
        std::vector<double> eff(graph.edges.size());
        std::size_t lc = 0;
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            eff[e] = graph.edges[e].kind == EdgeKind::Odometry
                         ? graph.edges[e].kappa
                         : w[lc++] * graph.edges[e].kappa;
        }
        return eff;
    };

    GncConfig ara_cfg;
    ara_cfg.c_squared = config.c1_squared;
    ara_cfg.continuation_factor = config.gnc_factor;
    report.ara = gnc_solve(
        num_lc,
        [&](const std::vector<double>& w) {
            angle_solver.factorize(angle_weights(w));
            return angle_solver.solve(angle_rhs);
        },
        [&](const Eigen::VectorXd& theta) {
            std::vector<double> r2(num_lc);
            for (int l = 0; l < num_lc; ++l) {
                const auto& e = graph.edges[lc_indices[l]];
                const double res = theta[e.to] - theta[e.from] - angle_rhs[lc_indices[l]];
                r2[l] = e.kappa * res * res;
            }
            return r2;
        },
        ara_cfg);
    report.ara_rotations.assign(report.ara.solution.data(),
                                report.ara.solution.data() + graph.num_vertices);
    report.timings.ara_s = seconds_since(t0);

    // Stage 2: GNC over translations with rotations fixed from stage 1.
    t0 = Clock::now();
    const std::vector<Eigen::Matrix2d> R_hat = rotations_from_thetas(report.ara_rotations);
    IncidenceSolver trans_solver(graph);
    std::vector<double> rhs_x(graph.edges.size()), rhs_y(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const Eigen::Vector2d b = R_hat[graph.edges[e].from] * graph.edges[e].dt;
        rhs_x[e] = b.x();
        rhs_y[e] = b.y();
    }
    auto trans_weights = [&](const std::vector<double>& w) {
        std::vector<double> eff(graph.edges.size());
        std::size_t lc = 0;
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            eff[e] = graph.edges[e].kind == EdgeKind::Odometry
                         ? graph.edges[e].tau
                         : w[lc++] * graph.edges[e].tau;
        }
        return eff;
    };

    GncConfig ta_cfg;
    ta_cfg.c_squared = config.c2_squared;
    ta_cfg.continuation_factor = config.gnc_factor;
    report.ta = gnc_solve(
        num_lc,
        [&](const std::vector<double>& w) {
            trans_solver.factorize(trans_weights(w));
            const Eigen::VectorXd tx = trans_solver.solve(rhs_x);
            const Eigen::VectorXd ty = trans_solver.solve(rhs_y);
            Eigen::VectorXd stacked(2 * graph.num_vertices);
            stacked.head(graph.num_vertices) = tx;
            stacked.tail(graph.num_vertices) = ty;
            return stacked;
        },
        [&](const Eigen::VectorXd& stacked) {
            const int nv = graph.num_vertices;
            std::vector<double> r2(num_lc);
            for (int l = 0; l < num_lc; ++l) {
                const int e = lc_indices[l];
                const auto& edge = graph.edges[e];
                const double rx = stacked[edge.to] - stacked[edge.from] - rhs_x[e];
                const double ry =
                    stacked[nv + edge.to] - stacked[nv + edge.from] - rhs_y[e];
                r2[l] = edge.tau * (rx * rx + ry * ry);
            }
            return r2;
        },
        ta_cfg);
    report.timings.ta_s = seconds_since(t0);

    // Inlier set: kept by both stages.
    for (int l = 0; l < num_lc; ++l) {
        if (report.ara.weights[l] == 1.0 && report.ta.weights[l] == 1.0) {
            report.inlier_loop_closures.push_back(lc_indices[l]);
        }
    }

    // Final refinement, initialized from the decoupled solves restricted to
    // the inlier set.
    t0 = Clock::now();
    std::vector<double> inlier_w(num_lc, 0.0);
    for (int l = 0; l < num_lc; ++l) {
        if (report.ara.weights[l] == 1.0 && report.ta.weights[l] == 1.0) {
            inlier_w[l] = 1.0;
        }
    }
    const std::vector<double> theta_init = solve_angles(graph, reg, inlier_w);
    const std::vector<Eigen::Vector2d> t_init =
        solve_translations(graph, rotations_from_thetas(theta_init), inlier_w);

    TrajectoryEstimate init;
    init.theta = theta_init;
    init.t = t_init;
    const RefineResult refined =
        refine_gauss_newton(graph, report.inlier_loop_closures, init);
    report.estimate = refined.estimate;
    report.refinement_iterations = refined.iterations;
    report.refinement_stalled = refined.stalled;
    report.timings.refine_s = seconds_since(t0);

    return report;
}

std::string report_to_json(const PipelineReport& report) {
    nlohmann::json j;
    j["inlier_loop_closures"] = report.inlier_loop_closures;
    j["converged"] = report.converged();
    j["ara_converged"] = report.ara.converged;
    j["ta_converged"] = report.ta.converged;
    j["max_rounding_residual"] = report.max_rounding_residual;
    j["refinement_iterations"] = report.refinement_iterations;
    j["refinement_stalled"] = report.refinement_stalled;
    j["timings"] = {{"regularization_s", report.timings.regularization_s},
                    {"ara_s", report.timings.ara_s},
                    {"ta_s", report.timings.ta_s},
                    {"refine_s", report.timings.refine_s}};
    auto trace_json = [](const std::vector<GncIterationStats>& trace) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : trace) {
            arr.push_back({{"iteration", s.iteration},
                           {"mu", s.mu},
                           {"cost", s.cost},
                           {"num_inlier_weights", s.num_inlier_weights}});
        }
        return arr;
    };
    j["ara_trace"] = trace_json(report.ara.trace);
    j["ta_trace"] = trace_json(report.ta.trace);

    nlohmann::json vertices = nlohmann::json::array();
    char buf[160];
    for (int i = 0; i < report.estimate.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "VERTEX_SE2 %d %.17g %.17g %.17g", i,
                      report.estimate.t[i].x(), report.estimate.t[i].y(),
                      report.estimate.theta[i]);
        vertices.push_back(buf);
    }
    j["estimate"] = vertices;
    return j.dump(2);
}

}  // namespace degnc
