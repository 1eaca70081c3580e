#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rolesim/graph.hpp"
#include "rolesim/lowrank.hpp"

namespace rolesim {

// Turns a symmetric similarity matrix into an undirected weighted graph
// (stored with both directed arcs per pair): weight max(S_ij, 0) for i != j,
// zero-weight pairs absent, diagonal dropped.
DirectedGraph similarity_graph(const Eigen::MatrixXd& s);

// Same, from a factor. Materializes X X^T, so guarded to n <= 5000.
DirectedGraph similarity_graph(const LowRankFactor& f);

// Nested partitions of the same node set, finest first, coarsest last. Every
// level is a coarsening of the previous one.
struct Hierarchy {
    std::vector<Partition> levels;

    const Partition& top() const { return levels.back(); }
};

// Writes one partition TSV per level ("<prefix>.level<i>.tsv") plus an index
// file "<prefix>.index.tsv" with lines "level<TAB>file<TAB>clusters".
void save_hierarchy(const Hierarchy& h, const std::string& prefix);

// Greedy modularity clustering (local moves + aggregation) on a symmetric
// weighted graph. Deterministic: fixed sweep order, seeded hash tie-breaks.
// Isolated nodes stay singletons. resolution scales the null-model term.
Hierarchy cluster(const DirectedGraph& sim_graph, double resolution = 1.0,
                  std::uint64_t seed = 0);

struct RoleExtractOptions {
    int rank = 10;
    std::optional<double> beta;  // default: 90% of the easy bound
    double resolution = 1.0;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    int max_iter = 10000;
};

// Full pipeline: rank-bounded similarity, similarity graph, clustering.
Hierarchy extract_roles(const DirectedGraph& g, const RoleExtractOptions& opts = {});

}  // namespace rolesim
