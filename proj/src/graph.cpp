#include "rolesim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "rolesim/detail/text.hpp"
#include "rolesim/errors.hpp"

namespace rolesim {

namespace {

std::string pair_str(int src, int dst) {
    return "(" + std::to_string(src) + ", " + std::to_string(dst) + ")";
}

[[noreturn]] void parse_fail(const std::string& path, int lineno, const std::string& what) {
    throw IoError(path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

DirectedGraph::DirectedGraph(int n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
    if (n < 0) throw std::invalid_argument("node count must be non-negative");
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.src < 0 || e.src >= n_ || e.dst < 0 || e.dst >= n_)
            throw std::invalid_argument("edge " + pair_str(e.src, e.dst) +
                                        " out of range for " + std::to_string(n_) + " nodes");
        if (!std::isfinite(e.weight) || e.weight < 0.0)
            throw std::invalid_argument("edge " + pair_str(e.src, e.dst) +
                                        " has a negative or non-finite weight");
        if (i > 0 && edges_[i - 1].src == e.src && edges_[i - 1].dst == e.dst)
            throw std::invalid_argument("duplicate edge " + pair_str(e.src, e.dst));
    }
}

Eigen::SparseMatrix<double> DirectedGraph::to_sparse() const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edges_.size());
    for (const Edge& e : edges_) trips.emplace_back(e.src, e.dst, e.weight);
    Eigen::SparseMatrix<double> m(n_, n_);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

Eigen::MatrixXd DirectedGraph::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (const Edge& e : edges_) m(e.src, e.dst) = e.weight;
    return m;
}

Partition::Partition(std::vector<int> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) return;
    int maxLabel = -1;
    for (int l : labels_) {
        if (l < 0) throw std::invalid_argument("cluster ids must be non-negative");
        maxLabel = std::max(maxLabel, l);
    }
    k_ = maxLabel + 1;
    std::vector<char> seen(static_cast<std::size_t>(k_), 0);
    for (int l : labels_) seen[static_cast<std::size_t>(l)] = 1;
    for (int c = 0; c < k_; ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw std::invalid_argument("cluster ids are not contiguous: id " +
                                        std::to_string(c) + " is unused");
}

Partition Partition::relabeled(const std::vector<int>& raw, bool* had_gaps) {
    std::vector<int> uniq;
    for (int l : raw) {
        if (l < 0) throw std::invalid_argument("cluster ids must be non-negative");
        uniq.push_back(l);
    }
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    bool gaps = false;
    for (std::size_t i = 0; i < uniq.size(); ++i)
        if (uniq[i] != static_cast<int>(i)) gaps = true;
    if (had_gaps) *had_gaps = gaps;
    std::vector<int> labels(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto it = std::lower_bound(uniq.begin(), uniq.end(), raw[i]);
        labels[i] = static_cast<int>(it - uniq.begin());
    }
    return Partition(std::move(labels));
}

DirectedGraph permute(const DirectedGraph& g, const std::vector<int>& perm) {
    const int n = g.num_nodes();
    if (static_cast<int>(perm.size()) != n)
        throw std::invalid_argument("permutation size does not match node count");
    std::vector<char> seen(perm.size(), 0);
    for (int v : perm) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
            throw std::invalid_argument("permutation is not a bijection on [0, n)");
        seen[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<Edge> edges;
    edges.reserve(g.edges().size());
    for (const Edge& e : g.edges())
        edges.push_back({perm[static_cast<std::size_t>(e.src)],
                         perm[static_cast<std::size_t>(e.dst)], e.weight});
    return DirectedGraph(n, std::move(edges));
}

DirectedGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Edge> edges;
    long long header_nodes = -1;
    long long max_index = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = detail::trim_cr(line);
        if (sv.empty()) continue;
        if (sv.front() == '#') {
            if (sv.substr(0, 6) == "#nodes") {
                if (header_nodes >= 0) parse_fail(path, lineno, "duplicate #nodes header");
                std::string_view rest = sv.substr(6);
                while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t'))
                    rest.remove_prefix(1);
                auto v = detail::parse_int(rest);
                if (!v || *v < 0) parse_fail(path, lineno, "malformed #nodes header");
                header_nodes = *v;
            }
            continue;
        }
        auto fields = detail::split(sv, '\t');
        if (fields.size() != 2 && fields.size() != 3)
            parse_fail(path, lineno, "expected 2 or 3 tab-separated fields");
        auto src = detail::parse_int(fields[0]);
        auto dst = detail::parse_int(fields[1]);
        if (!src || !dst) parse_fail(path, lineno, "malformed node index");
        double w = 1.0;
        if (fields.size() == 3) {
            auto pw = detail::parse_double(fields[2]);
            if (!pw) parse_fail(path, lineno, "malformed edge weight");
            w = *pw;
        }
        if (*src < 0 || *dst < 0) parse_fail(path, lineno, "negative node index");
        edges.push_back({static_cast<int>(*src), static_cast<int>(*dst), w});
        max_index = std::max({max_index, *src, *dst});
    }
    long long n = header_nodes >= 0 ? header_nodes : max_index + 1;
    return DirectedGraph(static_cast<int>(n), std::move(edges));
}

void save_edge_list(const DirectedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "#nodes " << g.num_nodes() << "\n";
    for (const Edge& e : g.edges())
        out << e.src << '\t' << e.dst << '\t' << detail::fmt_double(e.weight) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

Partition load_partition(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::pair<int, int>> rows;
    std::string line;
    int lineno = 0;
    long long max_node = -1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = detail::trim_cr(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = detail::split(sv, '\t');
        if (fields.size() != 2) parse_fail(path, lineno, "expected 2 tab-separated fields");
        auto node = detail::parse_int(fields[0]);
        auto label = detail::parse_int(fields[1]);
        if (!node || !label) parse_fail(path, lineno, "malformed node or label");
        if (*node < 0) parse_fail(path, lineno, "negative node index");
        if (*label < 0) parse_fail(path, lineno, "negative cluster id");
        rows.emplace_back(static_cast<int>(*node), static_cast<int>(*label));
        max_node = std::max(max_node, *node);
    }
    if (max_node + 1 != static_cast<long long>(rows.size()))
        throw IoError(path + ": node indices must cover 0..n-1 exactly once");
    std::vector<int> raw(rows.size(), -1);
    for (auto [node, label] : rows) {
        if (raw[static_cast<std::size_t>(node)] >= 0)
            throw IoError(path + ": node " + std::to_string(node) + " listed twice");
        raw[static_cast<std::size_t>(node)] = label;
    }
    bool had_gaps = false;
    Partition p = Partition::relabeled(raw, &had_gaps);
    if (had_gaps)
        std::cerr << "warning: " << path
                  << ": cluster ids renumbered to a contiguous range\n";
    return p;
}

void save_partition(const Partition& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (int i = 0; i < p.size(); ++i) out << i << '\t' << p[i] << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace rolesim
