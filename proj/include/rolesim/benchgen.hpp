#pragma once

#include <cstdint>
#include <vector>

#include "rolesim/graph.hpp"

namespace rolesim {

// Planted role structure: a binary role graph on k roles plus a block size
// per role. Ordered node pair (i, j) is an "in-pattern" pair when the role
// graph has an edge role(i) -> role(j).
class RoleModel {
public:
    RoleModel(DirectedGraph role_graph, std::vector<int> sizes);

    const DirectedGraph& role_graph() const { return role_graph_; }
    const std::vector<int>& sizes() const { return sizes_; }
    int num_roles() const { return role_graph_.num_nodes(); }
    int total_nodes() const { return total_; }

private:
    DirectedGraph role_graph_;
    std::vector<int> sizes_;
    int total_ = 0;
};

enum class RolePreset {
    community,  // k isolated self-loop roles: classic assortative blocks
    cycle,      // directed k-cycle of roles; cycle(1) is a single self-loop
};

DirectedGraph preset_role_graph(RolePreset kind, int k);

struct GenParams {
    double p_in = 0.0;
    double p_out = 0.0;
    std::uint64_t seed = 0;
};

struct GeneratedInstance {
    DirectedGraph graph;
    Partition truth;
    GenParams params;
};

// Block-structured directed ER draw: each ordered pair (i, j), i != j, gets an
// edge with probability p_in when (role(i), role(j)) is a role-graph edge and
// p_out otherwise. Self-loops are never generated. The per-pair coin is a
// counter-based hash of (seed, i, j), so output is independent of traversal
// order and bit-identical for equal seeds.
GeneratedInstance generate(const RoleModel& model, double p_in, double p_out,
                           std::uint64_t seed);

}  // namespace rolesim
