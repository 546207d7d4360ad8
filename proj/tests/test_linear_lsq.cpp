#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "degnc/linear_solvers.hpp"
#include "degnc/regularization.hpp"
#include "test_helpers.hpp"

using namespace degnc;

namespace {

PoseGraph triangle(double th01, double th12, double th02) {
    PoseGraph g;
    g.num_vertices = 3;
    g.edges.push_back({0, 1, th01, {1, 0}, 1.0, 1.0, EdgeKind::Odometry});
    g.edges.push_back({1, 2, th12, {1, 0}, 1.0, 1.0, EdgeKind::Odometry});
    g.edges.push_back({0, 2, th02, {2.3, 0.3}, 1.0, 1.0, EdgeKind::LoopClosure});
    return g;
}

// Builds the dense reference system for the weighted angle problem.
WeightedLinearSystem angle_system(const PoseGraph& g, const RegularizedAngles& reg,
                                  const std::vector<double>& lc_weights) {
    WeightedLinearSystem sys;
    sys.num_unknowns = g.num_vertices - 1;
    std::size_t lc = 0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& edge = g.edges[e];
        WeightedRow row;
        if (edge.from > 0) row.coeffs.push_back({edge.from - 1, -1.0});
        if (edge.to > 0) row.coeffs.push_back({edge.to - 1, 1.0});
        row.rhs = edge.dtheta - kTwoPi * reg.k[e];
        row.weight = edge.kappa;
        if (edge.kind == EdgeKind::LoopClosure) row.weight *= lc_weights[lc++];
        sys.rows.push_back(row);
    }
    return sys;
}

double angle_cost(const PoseGraph& g, const RegularizedAngles& reg,
                  const std::vector<double>& lc_weights,
                  const std::vector<double>& theta) {
    double cost = 0.0;
    std::size_t lc = 0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& edge = g.edges[e];
        double w = edge.kappa;
        if (edge.kind == EdgeKind::LoopClosure) w *= lc_weights[lc++];
        const double r =
            theta[edge.to] - theta[edge.from] + kTwoPi * reg.k[e] - edge.dtheta;
        cost += w * r * r;
    }
    return cost;
}

}  // namespace

TEST_CASE("noiseless chain: angles are prefix sums") {
    auto g = degnc::testing::random_graph(15, 0, 2);
    auto reg = compute_regularization(g);
    auto theta = solve_angles(g, reg, {});
    double expect = 0.0;
    for (int i = 0; i + 1 < g.num_vertices; ++i) {
        expect += g.edges[i].dtheta;
        CHECK(theta[i + 1] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("triangle fixture matches the hand solution") {
    auto g = triangle(1.0, 1.0, 2.3);
    auto reg = compute_regularization(g);
    auto theta = solve_angles(g, reg, {1.0});
    CHECK(theta[0] == 0.0);
    CHECK(theta[1] == doctest::Approx(1.1).epsilon(1e-10));
    CHECK(theta[2] == doctest::Approx(2.2).epsilon(1e-10));

    // Zero loop-closure weight falls back to the odometry-only solution.
    auto theta0 = solve_angles(g, reg, {0.0});
    CHECK(theta0[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(theta0[2] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("noiseless chain translations are cumulative sums") {
    auto g = degnc::testing::random_graph(10, 0, 5);
    for (auto& e : g.edges) e.dtheta = 0.0;
    std::vector<Eigen::Matrix2d> R(g.num_vertices, Eigen::Matrix2d::Identity());
    auto t = solve_translations(g, R, {});
    Eigen::Vector2d expect = Eigen::Vector2d::Zero();
    for (int i = 0; i + 1 < g.num_vertices; ++i) {
        expect += g.edges[i].dt;
        CHECK((t[i + 1] - expect).norm() < 1e-10);
    }
}

TEST_CASE("triangle translations solve per axis") {
    auto g = triangle(0, 0, 0);
    std::vector<Eigen::Matrix2d> R(3, Eigen::Matrix2d::Identity());
    auto t = solve_translations(g, R, {1.0});
    CHECK(t[1].x() == doctest::Approx(1.1).epsilon(1e-10));
    CHECK(t[1].y() == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(t[2].x() == doctest::Approx(2.2).epsilon(1e-10));
    CHECK(t[2].y() == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("rotating all frames rotates the translation solution") {
    auto g = degnc::testing::random_graph(12, 6, 9);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::vector<Eigen::Matrix2d> R(g.num_vertices);
    for (auto& Ri : R) Ri = rotation_from_angle(angle(rng));
    std::vector<double> w(6, 1.0);
    auto t = solve_translations(g, R, w);

    const Eigen::Matrix2d Q = rotation_from_angle(0.8);
    std::vector<Eigen::Matrix2d> RQ(g.num_vertices);
    for (int i = 0; i < g.num_vertices; ++i) RQ[i] = Q * R[i];
    auto tQ = solve_translations(g, RQ, w);
    for (int i = 0; i < g.num_vertices; ++i) {
        CHECK((tQ[i] - Q * t[i]).norm() < 1e-9);
    }
}

TEST_CASE("dense oracle basics") {
    // Identity system returns the rhs.
    WeightedLinearSystem sys;
    sys.num_unknowns = 4;
    for (int i = 0; i < 4; ++i) {
        sys.rows.push_back({{{i, 1.0}}, 0.5 * i, 1.0});
    }
    auto x = dense_oracle_solve(sys);
    for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(0.5 * i).epsilon(1e-14));

    // Doubling all weights leaves the minimizer unchanged.
    auto g = degnc::testing::random_graph(8, 4, 17);
    auto reg = compute_regularization(g);
    std::vector<double> w(4, 0.7);
    auto sys1 = angle_system(g, reg, w);
    auto sys2 = sys1;
    for (auto& row : sys2.rows) row.weight *= 2.0;
    CHECK((dense_oracle_solve(sys1) - dense_oracle_solve(sys2)).norm() < 1e-10);

    // Rank-deficient systems are rejected.
    WeightedLinearSystem bad;
    bad.num_unknowns = 2;
    bad.rows.push_back({{{0, 1.0}}, 1.0, 1.0});
    CHECK_THROWS(dense_oracle_solve(bad));
}

TEST_CASE("sparse solves match the dense oracle on random graphs") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> nv(5, 50);
    std::uniform_real_distribution<double> wdist(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = nv(rng);
        auto g = degnc::testing::random_graph(n, n / 2, 1000 + trial);
        auto reg = compute_regularization(g);
        std::vector<double> w(g.num_loop_closures());
        for (auto& wi : w) wi = wdist(rng);

        auto theta = solve_angles(g, reg, w);
        auto oracle = dense_oracle_solve(angle_system(g, reg, w));
        for (int i = 1; i < n; ++i) {
            CHECK(std::abs(theta[i] - oracle[i - 1]) < 1e-8);
        }
    }
}

TEST_CASE("gradient of the weighted cost vanishes at the solution") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> wdist(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = degnc::testing::random_graph(20, 10, 2000 + trial);
        auto reg = compute_regularization(g);
        std::vector<double> w(10);
        for (auto& wi : w) wi = wdist(rng);
        auto theta = solve_angles(g, reg, w);

        const double h = 1e-6;
        for (int i = 1; i < g.num_vertices; ++i) {
            auto plus = theta, minus = theta;
            plus[i] += h;
            minus[i] -= h;
            const double grad =
                (angle_cost(g, reg, w, plus) - angle_cost(g, reg, w, minus)) / (2 * h);
            CHECK(std::abs(grad) < 1e-6);
        }
    }
}

TEST_CASE("zero weight is equivalent to deleting the edge") {
    auto g = degnc::testing::random_graph(15, 6, 77);
    auto reg = compute_regularization(g);
    std::vector<double> w(6, 1.0);
    w[2] = 0.0;
    auto theta = solve_angles(g, reg, w);

    // Same graph with the third loop closure removed.
    PoseGraph cut;
    cut.num_vertices = g.num_vertices;
    int lc = 0;
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::LoopClosure && lc++ == 2) continue;
        cut.edges.push_back(e);
    }
    auto reg_cut = compute_regularization(cut);
    auto theta_cut = solve_angles(cut, reg_cut, {1.0, 1.0, 1.0, 1.0, 1.0});
    for (int i = 0; i < g.num_vertices; ++i) {
        CHECK(theta[i] == doctest::Approx(theta_cut[i]).epsilon(1e-12));
    }
}

TEST_CASE("weighted cost at the solution beats random perturbations") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> pert(0.0, 0.1);
    auto g = degnc::testing::random_graph(12, 5, 55);
    auto reg = compute_regularization(g);
    std::vector<double> w(5, 0.5);
    auto theta = solve_angles(g, reg, w);
    const double best = angle_cost(g, reg, w, theta);
    for (int trial = 0; trial < 50; ++trial) {
        auto other = theta;
        for (int i = 1; i < g.num_vertices; ++i) other[i] += pert(rng);
        CHECK(angle_cost(g, reg, w, other) >= best);
    }
}
