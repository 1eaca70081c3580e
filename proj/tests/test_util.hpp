#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rolesim/graph.hpp"
#include "rolesim/rng.hpp"

namespace testutil {

inline rolesim::DirectedGraph random_digraph(rolesim::rng::Stream& s, int n, double p,
                                             bool weighted = false) {
    std::vector<rolesim::Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (s.unit() < p)
                edges.push_back({i, j, weighted ? 0.25 + s.unit() : 1.0});
        }
    return rolesim::DirectedGraph(n, std::move(edges));
}

inline Eigen::MatrixXd random_symmetric(rolesim::rng::Stream& s, int n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = s.sym();
    return 0.5 * (m + m.transpose()).eval();
}

inline std::vector<int> random_permutation(rolesim::rng::Stream& s, int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(s.below(static_cast<std::uint64_t>(i + 1)))]);
    return perm;
}

// Equality of clusterings up to cluster relabeling.
inline bool same_clustering(const rolesim::Partition& a, const rolesim::Partition& b) {
    if (a.size() != b.size() || a.num_clusters() != b.num_clusters()) return false;
    std::vector<int> fwd(static_cast<std::size_t>(a.num_clusters()), -1);
    std::vector<int> bwd(static_cast<std::size_t>(b.num_clusters()), -1);
    for (int i = 0; i < a.size(); ++i) {
        const int x = a[i];
        const int y = b[i];
        if (fwd[static_cast<std::size_t>(x)] < 0) fwd[static_cast<std::size_t>(x)] = y;
        if (bwd[static_cast<std::size_t>(y)] < 0) bwd[static_cast<std::size_t>(y)] = x;
        if (fwd[static_cast<std::size_t>(x)] != y || bwd[static_cast<std::size_t>(y)] != x)
            return false;
    }
    return true;
}

// Entrywise definition of the propagation step, kept separate from the
// library implementation on purpose.
inline Eigen::MatrixXd gamma_entrywise(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double acc = 0.0;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = 0; q < n; ++q)
                    acc += a(i, p) * x(p, q) * a(j, q) + a(p, i) * x(p, q) * a(q, j);
            out(i, j) = acc;
        }
    return out;
}

// Pattern counts by brute-force enumeration of all 2^ell direction words:
// sum over words w of (w applied to A) times its transpose.
inline Eigen::MatrixXd pattern_count_words(const Eigen::MatrixXd& a, int ell) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd at = a.transpose();
    for (unsigned mask = 0; mask < (1u << ell); ++mask) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n, n);
        for (int b = 0; b < ell; ++b) w = w * ((mask >> b) & 1u ? at : a);
        acc += w * w.transpose();
    }
    return acc;
}

// Scratch directory for file round-trip tests.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rolesim_tests_" + name);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testutil
