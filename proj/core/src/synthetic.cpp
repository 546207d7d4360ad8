#include "degnc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace degnc {

namespace {

constexpr double kMaxPrecision = 1e8;  // stands in for 1/sigma^2 when sigma = 0

double precision_from_sigma(double sigma) {
    if (sigma < 0.0) {
        throw std::invalid_argument("noise std must be >= 0");
    }
    if (sigma == 0.0) return kMaxPrecision;
    return std::min(1.0 / (sigma * sigma), kMaxPrecision);
}

struct Layout {
    std::vector<Eigen::Vector2d> positions;
    std::vector<double> headings;
    double step;
};

// Boustrophedon sweep over the grid; heading points along the direction of
// travel to the next pose.
Layout grid_layout(const GridLayout& g) {
    if (g.rows < 1 || g.cols < 1 || g.rows * g.cols < 2) {
        throw std::invalid_argument("grid layout needs at least 2 poses");
    }
    Layout out;
    out.step = g.step;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            const int col = (r % 2 == 0) ? c : g.cols - 1 - c;
            out.positions.emplace_back(col * g.step, r * g.step);
        }
    }
    const int n = static_cast<int>(out.positions.size());
    out.headings.resize(n);
    for (int i = 0; i + 1 < n; ++i) {
        const Eigen::Vector2d d = out.positions[i + 1] - out.positions[i];
        out.headings[i] = std::atan2(d.y(), d.x());
    }
    out.headings[n - 1] = out.headings[n - 2];
    return out;
}

Layout random_walk_layout(const RandomWalkLayout& w, std::mt19937_64& rng) {
    if (w.n < 2) {
        throw std::invalid_argument("random walk needs at least 2 poses");
    }
    Layout out;
    out.step = w.step;
    std::uniform_real_distribution<double> turn(-kPi / 2.0, kPi / 2.0);
    double heading = 0.0;
    Eigen::Vector2d pos = Eigen::Vector2d::Zero();
    for (int i = 0; i < w.n; ++i) {
        out.positions.push_back(pos);
        out.headings.push_back(heading);
        pos += w.step * Eigen::Vector2d(std::cos(heading), std::sin(heading));
        heading = canonicalize_angle(heading + turn(rng));
    }
    return out;
}

}  // namespace

SyntheticResult generate_synthetic(const SyntheticSpec& spec) {
    std::mt19937_64 rng(spec.rng_seed);
    const Layout layout = std::holds_alternative<GridLayout>(spec.layout)
                              ? grid_layout(std::get<GridLayout>(spec.layout))
                              : random_walk_layout(std::get<RandomWalkLayout>(spec.layout), rng);
    const int n = static_cast<int>(layout.positions.size());

    const double kappa = precision_from_sigma(spec.sigma_theta);
    const double tau = precision_from_sigma(spec.sigma_t);

    std::normal_distribution<double> theta_noise(0.0, spec.sigma_theta > 0 ? spec.sigma_theta : 0.0);
    std::normal_distribution<double> t_noise(0.0, spec.sigma_t > 0 ? spec.sigma_t : 0.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto measure = [&](int i, int j, EdgeKind kind) {
        RelativeMeasurement m;
        m.from = i;
        m.to = j;
        m.kind = kind;
        const double eps_th = spec.sigma_theta > 0 ? theta_noise(rng) : 0.0;
        m.dtheta = canonicalize_angle(layout.headings[j] - layout.headings[i] + eps_th);
        const Eigen::Matrix2d Ri = rotation_from_angle(layout.headings[i]);
        Eigen::Vector2d eps_t = Eigen::Vector2d::Zero();
        if (spec.sigma_t > 0) {
            eps_t.x() = t_noise(rng);
            eps_t.y() = t_noise(rng);
        }
        m.dt = Ri.transpose() * (layout.positions[j] - layout.positions[i]) + eps_t;
        m.kappa = kappa;
        m.tau = tau;
        return m;
    };

    SyntheticResult result;
    result.graph.num_vertices = n;
    for (int i = 0; i + 1 < n; ++i) {
        result.graph.edges.push_back(measure(i, i + 1, EdgeKind::Odometry));
    }
    const double near = 1.5 * layout.step;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if ((layout.positions[j] - layout.positions[i]).norm() > near) continue;
            if (unit(rng) < spec.loop_closure_probability) {
                result.graph.edges.push_back(measure(i, j, EdgeKind::LoopClosure));
            }
        }
    }

    result.ground_truth.theta = layout.headings;
    result.ground_truth.t = layout.positions;
    // Shift to the anchored gauge.
    const double th0 = result.ground_truth.theta[0];
    const Eigen::Matrix2d R0inv = rotation_from_angle(th0).transpose();
    const Eigen::Vector2d p0 = result.ground_truth.t[0];
    for (int i = 0; i < n; ++i) {
        result.ground_truth.theta[i] = canonicalize_angle(result.ground_truth.theta[i] - th0);
        result.ground_truth.t[i] = R0inv * (result.ground_truth.t[i] - p0);
    }
    return result;
}

InjectionResult inject_outliers(const PoseGraph& graph, const InjectionSpec& spec) {
    if (!(spec.outlier_rate >= 0.0) || !(spec.outlier_rate < 1.0)) {
        throw std::invalid_argument("outlier rate must be in [0, 1)");
    }
    const int n = graph.num_vertices;
    if (n < 2) {
        throw std::invalid_argument("graph needs at least 2 vertices");
    }

    InjectionResult result;
    result.graph = graph;

    const int num_true_lc = graph.num_loop_closures();
    const int count = static_cast<int>(
        std::llround(spec.outlier_rate / (1.0 - spec.outlier_rate) * num_true_lc));
    if (count == 0) return result;

    // kappa/tau copied from the median loop closure (odometry as fallback).
    std::vector<double> kappas, taus;
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::LoopClosure) {
            kappas.push_back(e.kappa);
            taus.push_back(e.tau);
        }
    }
    if (kappas.empty()) {
        for (const auto& e : graph.edges) {
            kappas.push_back(e.kappa);
            taus.push_back(e.tau);
        }
    }
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    const double kappa = median(kappas);
    const double tau = median(taus);

    // Trajectory extent from odometry dead reckoning.
    double heading = 0.0;
    Eigen::Vector2d pos = Eigen::Vector2d::Zero();
    Eigen::Vector2d lo = pos, hi = pos;
    for (const auto& e : graph.edges) {
        if (e.kind != EdgeKind::Odometry) continue;
        pos += rotation_from_angle(heading) * e.dt;
        heading += e.dtheta;
        lo = lo.cwiseMin(pos);
        hi = hi.cwiseMax(pos);
    }
    const double extent = std::max((hi - lo).maxCoeff(), 1.0);

    std::set<std::pair<int, int>> taken;
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::LoopClosure) {
            taken.insert(std::minmax(e.from, e.to));
        }
    }

    const long long total_pairs = static_cast<long long>(n) * (n - 1) / 2 - (n - 1);
    if (count > total_pairs - static_cast<long long>(taken.size())) {
        throw std::invalid_argument("requested outlier count exceeds available pose pairs");
    }

    std::mt19937_64 rng(spec.rng_seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> box(-extent, extent);

    int injected = 0;
    while (injected < count) {
        int i = pick(rng), j = pick(rng);
        if (i == j || std::abs(i - j) == 1) continue;
        if (i > j) std::swap(i, j);
        if (!taken.insert({i, j}).second) continue;

        RelativeMeasurement m;
        m.from = i;
        m.to = j;
        m.kind = EdgeKind::LoopClosure;
        m.dtheta = canonicalize_angle(angle(rng));
        m.dt = Eigen::Vector2d(box(rng), box(rng));
        m.kappa = kappa;
        m.tau = tau;
        result.injected_edges.push_back(static_cast<int>(result.graph.edges.size()));
        result.graph.edges.push_back(m);
        ++injected;
    }
    return result;
}

}  // namespace degnc
