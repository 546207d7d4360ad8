#ifndef DEGNC_G2O_IO_HPP
#define DEGNC_G2O_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "degnc/pose_graph.hpp"

namespace degnc {

struct G2oParseResult {
    PoseGraph graph;
    std::optional<TrajectoryEstimate> initial;
};

/// Reads VERTEX_SE2 / EDGE_SE2 records from a g2o 2D text stream.
/// Vertex ids are remapped densely to 0..n-1 in order of first appearance;
/// edges with |i - j| = 1 become odometry, everything else a loop closure.
/// kappa/tau come from the edge information matrix: tau = (I11 + I22)/2,
/// kappa = I33 (off-diagonals discarded). Unknown record tags are skipped
/// with a warning on stderr. Duplicate loop-closure pairs keep the first
/// occurrence.
G2oParseResult parse_g2o(std::istream& in);
G2oParseResult parse_g2o_file(const std::string& path);

/// Writes the graph (and optional estimate as VERTEX_SE2 records) so that
/// parse_g2o reproduces it within 1e-12 per float, edge order preserved.
void write_g2o(std::ostream& out, const PoseGraph& graph,
               const TrajectoryEstimate* estimate = nullptr);
void write_g2o_file(const std::string& path, const PoseGraph& graph,
                    const TrajectoryEstimate* estimate = nullptr);

}  // namespace degnc

#endif
