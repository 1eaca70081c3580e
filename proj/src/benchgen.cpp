#include "rolesim/benchgen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rolesim/rng.hpp"

namespace rolesim {

RoleModel::RoleModel(DirectedGraph role_graph, std::vector<int> sizes)
    : role_graph_(std::move(role_graph)), sizes_(std::move(sizes)) {
    const int k = role_graph_.num_nodes();
    if (k < 1) throw std::invalid_argument("role graph needs at least one role");
    if (static_cast<int>(sizes_.size()) != k)
        throw std::invalid_argument("need one block size per role");
    for (int s : sizes_) {
        if (s < 1) throw std::invalid_argument("block sizes must be positive");
        total_ += s;
    }
    for (const Edge& e : role_graph_.edges())
        if (e.weight != 0.0 && e.weight != 1.0)
            throw std::invalid_argument("role graph must be binary (weights 0 or 1)");
}

DirectedGraph preset_role_graph(RolePreset kind, int k) {
    if (k < 1) throw std::invalid_argument("preset role graphs need k >= 1");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) {
        const int dst = kind == RolePreset::community ? b : (b + 1) % k;
        edges.push_back({b, dst, 1.0});
    }
    return DirectedGraph(k, std::move(edges));
}

GeneratedInstance generate(const RoleModel& model, double p_in, double p_out,
                           std::uint64_t seed) {
    if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0))
        throw std::invalid_argument("edge probabilities must lie in [0, 1]");
    const int k = model.num_roles();
    const int n = model.total_nodes();

    std::vector<std::vector<char>> in_pattern(static_cast<std::size_t>(k),
                                              std::vector<char>(static_cast<std::size_t>(k), 0));
    for (const Edge& e : model.role_graph().edges())
        if (e.weight == 1.0)
            in_pattern[static_cast<std::size_t>(e.src)][static_cast<std::size_t>(e.dst)] = 1;

    std::vector<int> role(static_cast<std::size_t>(n));
    {
        int node = 0;
        for (int b = 0; b < k; ++b)
            for (int c = 0; c < model.sizes()[static_cast<std::size_t>(b)]; ++c)
                role[static_cast<std::size_t>(node++)] = b;
    }

    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        const auto& row = in_pattern[static_cast<std::size_t>(role[static_cast<std::size_t>(i)])];
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double p = row[static_cast<std::size_t>(role[static_cast<std::size_t>(j)])]
                                 ? p_in
                                 : p_out;
            if (rng::to_unit(rng::hash3(seed, static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(j))) < p)
                edges.push_back({i, j, 1.0});
        }
    }
    return {DirectedGraph(n, std::move(edges)), Partition(std::move(role)),
            GenParams{p_in, p_out, seed}};
}

}  // namespace rolesim
