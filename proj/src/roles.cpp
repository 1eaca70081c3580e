#include "rolesim/roles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "rolesim/errors.hpp"
#include "rolesim/rng.hpp"

namespace rolesim {

namespace {

// Undirected weighted adjacency with explicit self-loop weights. Directed
// input arcs contribute half their weight to each orientation, so a graph
// stored with both arcs per pair keeps its nominal pair weight.
struct Adj {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> nbrs;  // coalesced, j != i
    std::vector<double> selfw;                              // W_ii
    std::vector<double> deg;                                // k_i, self-loop counted once
    double two_m = 0.0;                                     // sum of degrees
};

void finish_adj(Adj& adj) {
    for (int i = 0; i < adj.n; ++i) {
        auto& row = adj.nbrs[static_cast<std::size_t>(i)];
        std::sort(row.begin(), row.end());
        std::size_t w = 0;
        for (std::size_t rd = 0; rd < row.size(); ++rd) {
            if (w > 0 && row[w - 1].first == row[rd].first)
                row[w - 1].second += row[rd].second;
            else
                row[w++] = row[rd];
        }
        row.resize(w);
        double k = adj.selfw[static_cast<std::size_t>(i)];
        for (const auto& [j, wt] : row) k += wt;
        adj.deg[static_cast<std::size_t>(i)] = k;
        adj.two_m += k;
    }
}

Adj build_adj(const DirectedGraph& g) {
    Adj adj;
    adj.n = g.num_nodes();
    adj.nbrs.resize(static_cast<std::size_t>(adj.n));
    adj.selfw.assign(static_cast<std::size_t>(adj.n), 0.0);
    adj.deg.assign(static_cast<std::size_t>(adj.n), 0.0);
    for (const Edge& e : g.edges()) {
        if (e.src == e.dst) {
            adj.selfw[static_cast<std::size_t>(e.src)] += e.weight;
        } else {
            adj.nbrs[static_cast<std::size_t>(e.src)].emplace_back(e.dst, 0.5 * e.weight);
            adj.nbrs[static_cast<std::size_t>(e.dst)].emplace_back(e.src, 0.5 * e.weight);
        }
    }
    finish_adj(adj);
    return adj;
}

// One local-move phase. Nodes are swept in index order; a node moves to the
// neighboring community with the best modularity gain, with hash tie-breaks,
// and only for a strict improvement over staying put. Returns the community
// assignment (not yet renumbered).
std::vector<int> local_move(const Adj& adj, double resolution, std::uint64_t seed) {
    const int n = adj.n;
    std::vector<int> comm(static_cast<std::size_t>(n));
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> tot = adj.deg;  // degree sum per community
    const double inv2m = adj.two_m > 0.0 ? 1.0 / adj.two_m : 0.0;

    std::vector<double> wcomm(static_cast<std::size_t>(n), 0.0);
    std::vector<int> touched;
    touched.reserve(16);

    bool moved = true;
    int sweeps = 0;
    while (moved && sweeps < 10000) {
        moved = false;
        ++sweeps;
        for (int i = 0; i < n; ++i) {
            const int a = comm[static_cast<std::size_t>(i)];
            const double ki = adj.deg[static_cast<std::size_t>(i)];
            tot[static_cast<std::size_t>(a)] -= ki;

            touched.clear();
            for (const auto& [j, w] : adj.nbrs[static_cast<std::size_t>(i)]) {
                const int c = comm[static_cast<std::size_t>(j)];
                if (wcomm[static_cast<std::size_t>(c)] == 0.0 &&
                    std::find(touched.begin(), touched.end(), c) == touched.end())
                    touched.push_back(c);
                wcomm[static_cast<std::size_t>(c)] += w;
            }
            if (std::find(touched.begin(), touched.end(), a) == touched.end())
                touched.push_back(a);

            const auto score = [&](int c) {
                return wcomm[static_cast<std::size_t>(c)] -
                       resolution * ki * tot[static_cast<std::size_t>(c)] * inv2m;
            };
            const double eps = 1e-12 * (1.0 + ki);
            int best = a;
            double best_score = score(a);
            std::uint64_t best_tie = rng::hash3(seed, static_cast<std::uint64_t>(i),
                                                static_cast<std::uint64_t>(a));
            for (int c : touched) {
                if (c == a) continue;
                const double sc = score(c);
                const std::uint64_t tie = rng::hash3(seed, static_cast<std::uint64_t>(i),
                                                     static_cast<std::uint64_t>(c));
                if (sc > best_score + eps || (std::abs(sc - best_score) <= eps && tie < best_tie)) {
                    best = c;
                    best_score = sc;
                    best_tie = tie;
                }
            }
            // Strict improvement over the current community blocks churn on ties.
            if (best != a && best_score <= score(a) + eps) best = a;

            for (int c : touched) wcomm[static_cast<std::size_t>(c)] = 0.0;
            comm[static_cast<std::size_t>(i)] = best;
            tot[static_cast<std::size_t>(best)] += ki;
            if (best != a) moved = true;
        }
    }
    return comm;
}

// Renumbers labels to [0, k) in order of first appearance.
int renumber(std::vector<int>& labels) {
    std::vector<int> map(labels.size(), -1);
    int next = 0;
    for (int& l : labels) {
        if (map[static_cast<std::size_t>(l)] < 0) map[static_cast<std::size_t>(l)] = next++;
        l = map[static_cast<std::size_t>(l)];
    }
    return next;
}

Adj aggregate(const Adj& adj, const std::vector<int>& comm, int k) {
    Adj out;
    out.n = k;
    out.nbrs.resize(static_cast<std::size_t>(k));
    out.selfw.assign(static_cast<std::size_t>(k), 0.0);
    out.deg.assign(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < adj.n; ++i) {
        const int c = comm[static_cast<std::size_t>(i)];
        out.selfw[static_cast<std::size_t>(c)] += adj.selfw[static_cast<std::size_t>(i)];
        for (const auto& [j, w] : adj.nbrs[static_cast<std::size_t>(i)]) {
            const int d = comm[static_cast<std::size_t>(j)];
            if (d == c)
                // Internal ordered pairs both land here, which is exactly the
                // double-counted internal weight the self-loop must carry.
                out.selfw[static_cast<std::size_t>(c)] += w;
            else
                out.nbrs[static_cast<std::size_t>(c)].emplace_back(d, w);
        }
    }
    finish_adj(out);
    return out;
}

}  // namespace

DirectedGraph similarity_graph(const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("similarity matrix must be square");
    const int n = static_cast<int>(s.rows());
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = std::max(0.5 * (s(i, j) + s(j, i)), 0.0);
            if (w > 0.0) edges.push_back({i, j, w});
        }
    }
    return DirectedGraph(n, std::move(edges));
}

DirectedGraph similarity_graph(const LowRankFactor& f) {
    if (f.n() > 5000)
        throw std::invalid_argument("materializing the factor is limited to n <= 5000");
    return similarity_graph(materialize(f));
}

void save_hierarchy(const Hierarchy& h, const std::string& prefix) {
    std::ofstream index(prefix + ".index.tsv");
    if (!index) throw IoError("cannot open " + prefix + ".index.tsv for writing");
    for (std::size_t i = 0; i < h.levels.size(); ++i) {
        const std::string file = prefix + ".level" + std::to_string(i) + ".tsv";
        save_partition(h.levels[i], file);
        index << i << '\t' << file << '\t' << h.levels[i].num_clusters() << "\n";
    }
    if (!index) throw IoError("write failed: " + prefix + ".index.tsv");
}

Hierarchy cluster(const DirectedGraph& sim_graph, double resolution, std::uint64_t seed) {
    if (sim_graph.num_nodes() < 1)
        throw std::invalid_argument("clustering needs at least one node");
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");

    Hierarchy h;
    Adj adj = build_adj(sim_graph);
    std::vector<int> node_to_super(static_cast<std::size_t>(adj.n));
    std::iota(node_to_super.begin(), node_to_super.end(), 0);

    for (int level = 0;; ++level) {
        std::vector<int> assign = local_move(adj, resolution, rng::hash2(seed, level));
        const int k = renumber(assign);
        std::vector<int> composed(node_to_super.size());
        for (std::size_t v = 0; v < node_to_super.size(); ++v)
            composed[v] = assign[static_cast<std::size_t>(node_to_super[v])];
        if (k == adj.n) {
            // No merges: keep only as the base level of an otherwise empty
            // hierarchy (structureless graph).
            if (h.levels.empty()) h.levels.push_back(Partition(std::move(composed)));
            break;
        }
        h.levels.push_back(Partition(composed));
        node_to_super = std::move(composed);
        adj = aggregate(adj, assign, k);
    }
    return h;
}

Hierarchy extract_roles(const DirectedGraph& g, const RoleExtractOptions& opts) {
    const double beta = opts.beta ? *opts.beta : default_beta(g);
    LowRankResult low =
        lowrank_similarity(g, opts.rank, beta, opts.tol, opts.max_iter);
    return cluster(similarity_graph(low.factor), opts.resolution, opts.seed);
}

}  // namespace rolesim
