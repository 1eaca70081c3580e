#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace rolesim {

struct Edge {
    int src = 0;
    int dst = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Weighted directed graph over nodes 0..n-1. Edges are canonicalized to
// (src, dst) order; duplicate pairs are rejected, weights must be finite and
// non-negative. Immutable after construction.
class DirectedGraph {
public:
    DirectedGraph() = default;
    DirectedGraph(int n, std::vector<Edge> edges);

    int num_nodes() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    Eigen::SparseMatrix<double> to_sparse() const;
    Eigen::MatrixXd to_dense() const;

    friend bool operator==(const DirectedGraph&, const DirectedGraph&) = default;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

// Cluster assignment per node; cluster ids always form the contiguous range
// [0, k) with every id used.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> labels);

    // Maps arbitrary non-negative labels onto [0, k), preserving ascending
    // label order. *had_gaps reports whether renumbering changed anything.
    static Partition relabeled(const std::vector<int>& raw, bool* had_gaps = nullptr);

    int size() const { return static_cast<int>(labels_.size()); }
    int num_clusters() const { return k_; }
    int operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& labels() const { return labels_; }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<int> labels_;
    int k_ = 0;
};

// Relabels nodes by a bijection perm: node i becomes perm[i].
DirectedGraph permute(const DirectedGraph& g, const std::vector<int>& perm);

// Edge list TSV: "src<TAB>dst<TAB>weight", weight optional (default 1).
// '#'-prefixed lines are comments; "#nodes N" pins the node count, which is
// otherwise 1 + max node index.
DirectedGraph load_edge_list(const std::string& path);
void save_edge_list(const DirectedGraph& g, const std::string& path);

// Partition TSV: "node<TAB>label", one line per node, nodes 0..n-1.
Partition load_partition(const std::string& path);
void save_partition(const Partition& p, const std::string& path);

}  // namespace rolesim
