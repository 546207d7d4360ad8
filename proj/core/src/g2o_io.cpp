#include "degnc/g2o_io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace degnc {

namespace {

struct RawEdge {
    int from, to;            // dense ids
    int file_from, file_to;  // ids as written, used for edge classification
    double dx, dy, dtheta;
    double i11, i12, i13, i22, i23, i33;
};

double parse_double(const std::string& token, int line_no) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("g2o parse error at line " + std::to_string(line_no) +
                                 ": bad numeric field '" + token + "'");
    }
    if (pos != token.size()) {
        throw std::runtime_error("g2o parse error at line " + std::to_string(line_no) +
                                 ": bad numeric field '" + token + "'");
    }
    return v;
}

int parse_int(const std::string& token, int line_no) {
    double v = parse_double(token, line_no);
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw std::runtime_error("g2o parse error at line " + std::to_string(line_no) +
                                 ": expected integer id, got '" + token + "'");
    }
    return i;
}

// Inverts an SE(2) relative measurement (used to normalize odometry
// direction to ascending vertex order).
void invert_measurement(double& dtheta, Eigen::Vector2d& dt) {
    const Eigen::Matrix2d R = rotation_from_angle(dtheta);
    dt = -(R.transpose() * dt);
    dtheta = canonicalize_angle(-dtheta);
}

}  // namespace

void validate_pose_graph(const PoseGraph& graph) {
    const int n = graph.num_vertices;
    if (n < 2) {
        throw std::invalid_argument("pose graph needs at least 2 vertices");
    }
    std::vector<bool> odo_present(n - 1, false);
    for (const auto& e : graph.edges) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n || e.from == e.to) {
            throw std::invalid_argument("edge endpoints out of range");
        }
        if (!(e.kappa > 0.0) || !(e.tau > 0.0)) {
            throw std::invalid_argument("edge kappa/tau must be positive");
        }
        if (e.kind == EdgeKind::Odometry) {
            if (e.to != e.from + 1) {
                throw std::invalid_argument("odometry edge is not (i, i+1)");
            }
            odo_present[e.from] = true;
        }
    }
    for (int i = 0; i < n - 1; ++i) {
        if (!odo_present[i]) {
            throw std::invalid_argument("missing odometry edge (" + std::to_string(i) +
                                        ", " + std::to_string(i + 1) + ")");
        }
    }
}

G2oParseResult parse_g2o(std::istream& in) {
    std::unordered_map<int, int> id_map;  // file id -> dense id, in file order
    std::vector<std::array<double, 3>> vertex_poses;  // indexed by dense id of VERTEX records
    std::unordered_map<int, int> vertex_record;       // dense id -> index into vertex_poses
    std::vector<RawEdge> raw_edges;

    auto dense_id = [&id_map](int file_id) {
        auto it = id_map.find(file_id);
        if (it != id_map.end()) return it->second;
        int next = static_cast<int>(id_map.size());
        id_map.emplace(file_id, next);
        return next;
    };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;

        std::vector<std::string> tokens;
        for (std::string t; ls >> t;) tokens.push_back(t);

        if (tag == "VERTEX_SE2") {
            if (tokens.size() != 4) {
                throw std::runtime_error("g2o parse error at line " + std::to_string(line_no) +
                                         ": VERTEX_SE2 needs 4 fields");
            }
            int id = dense_id(parse_int(tokens[0], line_no));
            vertex_record[id] = static_cast<int>(vertex_poses.size());
            vertex_poses.push_back({parse_double(tokens[1], line_no),
                                    parse_double(tokens[2], line_no),
                                    parse_double(tokens[3], line_no)});
        } else if (tag == "EDGE_SE2") {
            if (tokens.size() != 11) {
                throw std::runtime_error("g2o parse error at line " + std::to_string(line_no) +
                                         ": EDGE_SE2 needs 11 fields");
            }
            RawEdge e;
            e.file_from = parse_int(tokens[0], line_no);
            e.file_to = parse_int(tokens[1], line_no);
            e.from = dense_id(e.file_from);
            e.to = dense_id(e.file_to);
            e.dx = parse_double(tokens[2], line_no);
            e.dy = parse_double(tokens[3], line_no);
            e.dtheta = parse_double(tokens[4], line_no);
            e.i11 = parse_double(tokens[5], line_no);
            e.i12 = parse_double(tokens[6], line_no);
            e.i13 = parse_double(tokens[7], line_no);
            e.i22 = parse_double(tokens[8], line_no);
            e.i23 = parse_double(tokens[9], line_no);
            e.i33 = parse_double(tokens[10], line_no);
            raw_edges.push_back(e);
        } else {
            std::cerr << "parse_g2o: skipping unknown record '" << tag << "' at line "
                      << line_no << "\n";
        }
    }

    const int n = static_cast<int>(id_map.size());
    if (n == 0) {
        throw std::runtime_error("g2o validation error: no vertices");
    }

    PoseGraph graph;
    graph.num_vertices = n;
    std::set<std::pair<int, int>> seen_lc;
    for (const auto& re : raw_edges) {
        RelativeMeasurement m;
        m.from = re.from;
        m.to = re.to;
        m.dtheta = canonicalize_angle(re.dtheta);
        m.dt = Eigen::Vector2d(re.dx, re.dy);
        m.tau = (re.i11 + re.i22) / 2.0;
        m.kappa = re.i33;
        if (std::abs(re.file_from - re.file_to) == 1) {
            m.kind = EdgeKind::Odometry;
            if (m.to < m.from) {
                std::swap(m.from, m.to);
                invert_measurement(m.dtheta, m.dt);
            }
        } else {
            m.kind = EdgeKind::LoopClosure;
            auto key = std::minmax(m.from, m.to);
            if (!seen_lc.insert({key.first, key.second}).second) {
                std::cerr << "parse_g2o: dropping duplicate loop closure (" << m.from
                          << ", " << m.to << ")\n";
                continue;
            }
        }
        graph.edges.push_back(m);
    }

    validate_pose_graph(graph);

    G2oParseResult result;
    result.graph = std::move(graph);
    if (static_cast<int>(vertex_record.size()) == n) {
        TrajectoryEstimate est;
        est.theta.resize(n);
        est.t.resize(n);
        for (const auto& [id, rec] : vertex_record) {
            est.t[id] = Eigen::Vector2d(vertex_poses[rec][0], vertex_poses[rec][1]);
            est.theta[id] = vertex_poses[rec][2];
        }
        result.initial = std::move(est);
    }
    return result;
}

G2oParseResult parse_g2o_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    return parse_g2o(in);
}

void write_g2o(std::ostream& out, const PoseGraph& graph,
               const TrajectoryEstimate* estimate) {
    char buf[512];
    if (estimate != nullptr) {
        for (int i = 0; i < estimate->size(); ++i) {
            std::snprintf(buf, sizeof(buf), "VERTEX_SE2 %d %.17g %.17g %.17g\n", i,
                          estimate->t[i].x(), estimate->t[i].y(), estimate->theta[i]);
            out << buf;
        }
    }
    for (const auto& e : graph.edges) {
        std::snprintf(buf, sizeof(buf),
                      "EDGE_SE2 %d %d %.17g %.17g %.17g %.17g 0 0 %.17g 0 %.17g\n",
                      e.from, e.to, e.dt.x(), e.dt.y(), e.dtheta, e.tau, e.tau, e.kappa);
        out << buf;
    }
}

void write_g2o_file(const std::string& path, const PoseGraph& graph,
                    const TrajectoryEstimate* estimate) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path);
    }
    write_g2o(out, graph, estimate);
}

}  // namespace degnc
