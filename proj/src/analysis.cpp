#include "rolesim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "rolesim/detail/text.hpp"
#include "rolesim/errors.hpp"
#include "rolesim/lowrank.hpp"
#include "rolesim/rng.hpp"
#include "rolesim/roles.hpp"
#include "rolesim/similarity.hpp"

namespace rolesim {

namespace {

// Entropy of a count multiset. Sorting first makes the floating-point sum a
// function of the multiset alone, so entropies of equal count profiles are
// bit-identical; that is what makes nmi exactly symmetric, exactly relabel
// invariant, and exactly 1 on identical partitions.
double count_entropy(std::vector<long long> counts, long long n) {
    std::sort(counts.begin(), counts.end());
    const double dn = static_cast<double>(n);
    double h = 0.0;
    for (long long c : counts)
        if (c > 0) {
            const double p = static_cast<double>(c) / dn;
            h -= p * std::log(p);
        }
    return h;
}

}  // namespace

double nmi(const Partition& a, const Partition& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("partitions cover different node counts");
    const int n = a.size();
    if (n == 0) throw std::invalid_argument("partitions are empty");
    const int ka = a.num_clusters();
    const int kb = b.num_clusters();
    std::vector<long long> ca(static_cast<std::size_t>(ka), 0);
    std::vector<long long> cb(static_cast<std::size_t>(kb), 0);
    std::vector<long long> joint(static_cast<std::size_t>(ka) * static_cast<std::size_t>(kb), 0);
    for (int i = 0; i < n; ++i) {
        ca[static_cast<std::size_t>(a[i])] += 1;
        cb[static_cast<std::size_t>(b[i])] += 1;
        joint[static_cast<std::size_t>(a[i]) * static_cast<std::size_t>(kb) +
              static_cast<std::size_t>(b[i])] += 1;
    }
    const double ha = count_entropy(std::move(ca), n);
    const double hb = count_entropy(std::move(cb), n);
    // Degenerate single-cluster inputs carry no information to normalize.
    if (ha == 0.0 && hb == 0.0) return 1.0;
    if (ha == 0.0 || hb == 0.0) return 0.0;
    const double mi = ha + hb - count_entropy(std::move(joint), n);
    const double v = 2.0 * mi / (ha + hb);
    return std::min(1.0, std::max(0.0, v));
}

RankSweepReport rank_sweep(const DirectedGraph& g, int r_max, std::optional<double> beta,
                           double tol, int max_iter) {
    const int n = g.num_nodes();
    if (n > 2000) throw std::invalid_argument("rank sweep densifies and is limited to n <= 2000");
    if (r_max < 1) throw std::invalid_argument("r_max must be at least 1");
    if (r_max + 1 > n)
        throw std::invalid_argument("rank sweep needs r_max + 1 <= n");
    const double b = beta ? *beta : default_beta(g);

    SimilarityResult full = full_similarity(g, b, tol, max_iter);
    if (!full.report.converged)
        throw NumericError("full similarity did not converge; sweep gaps would be meaningless");
    const double sn = full.matrix.norm();

    RankSweepReport rep;
    rep.rows.resize(static_cast<std::size_t>(r_max));
    Eigen::MatrixXd prev;  // S^(r) for the previous r
    for (int r = 1; r <= r_max + 1; ++r) {
        Eigen::MatrixXd cur = materialize(lowrank_similarity(g, r, b, tol, max_iter).factor);
        if (r >= 2) {
            auto& row = rep.rows[static_cast<std::size_t>(r - 2)];
            row.step_norm = (cur - prev).norm();
        }
        if (r <= r_max) {
            auto& row = rep.rows[static_cast<std::size_t>(r - 1)];
            row.r = r;
            row.full_gap = (full.matrix - cur).norm();
        }
        prev = std::move(cur);
    }

    if (sn > 0.0) {
        const double floor = 1e-15 * sn;
        double best_ratio = 0.0;
        int best_r = 0;
        for (int r = 2; r <= r_max; ++r) {
            const double prev_step = rep.rows[static_cast<std::size_t>(r - 2)].step_norm;
            const double cur_step =
                std::max(rep.rows[static_cast<std::size_t>(r - 1)].step_norm, floor);
            const double ratio = prev_step / cur_step;
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best_r = r;
            }
        }
        if (best_r > 0 && best_ratio > 10.0) rep.knee = best_r;
    }
    return rep;
}

void save_rank_sweep_csv(const RankSweepReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "#knee " << (report.knee ? std::to_string(*report.knee) : std::string("none"))
        << "\n";
    out << "r,full_gap,step_norm\n";
    for (const RankSweepRow& row : report.rows)
        out << row.r << ',' << detail::fmt_double(row.full_gap) << ','
            << detail::fmt_double(row.step_norm) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

namespace {

NmiCell run_cell(const RoleModel& model, int ip, int jp, const GridOptions& opt) {
    const double p_in = ip * opt.step;
    const double p_out = jp * opt.step;
    double sum_full = 0.0, sum_low = 0.0;
    for (int t = 0; t < opt.realizations; ++t) {
        const std::uint64_t seed =
            rng::hash4(opt.seed_base, static_cast<std::uint64_t>(ip),
                       static_cast<std::uint64_t>(jp), static_cast<std::uint64_t>(t));
        GeneratedInstance inst = generate(model, std::min(p_in, 1.0), std::min(p_out, 1.0), seed);
        const double beta = default_beta(inst.graph);
        const std::uint64_t cseed = rng::hash2(seed, 0xC1u);

        SimilarityResult full =
            full_similarity(inst.graph, beta, opt.tol, opt.max_iter);
        if (!full.report.converged)
            throw NumericError("full similarity did not converge inside the sweep");
        sum_full += nmi(cluster(similarity_graph(full.matrix), opt.resolution, cseed).top(),
                        inst.truth);

        LowRankResult low =
            lowrank_similarity(inst.graph, opt.rank, beta, opt.tol, opt.max_iter);
        sum_low += nmi(cluster(similarity_graph(low.factor), opt.resolution, cseed).top(),
                       inst.truth);
    }
    return {p_in, p_out, sum_full / opt.realizations, sum_low / opt.realizations,
            opt.realizations};
}

}  // namespace

NmiGrid nmi_grid(const RoleModel& model, const GridOptions& opts) {
    if (!(opts.step > 0.0 && opts.step <= 1.0))
        throw std::invalid_argument("grid step must lie in (0, 1]");
    const double cells_d = 1.0 / opts.step;
    const long long m = std::llround(cells_d);
    if (std::abs(m * opts.step - 1.0) > 1e-9)
        throw std::invalid_argument("grid step must divide 1 evenly");
    if (opts.realizations < 1) throw std::invalid_argument("need at least one realization");
    if (opts.rank < 1 || opts.rank > model.total_nodes())
        throw std::invalid_argument("rank must lie in [1, n] for the model size");

    const int side = static_cast<int>(m) + 1;
    NmiGrid grid;
    grid.step = opts.step;
    grid.cells.resize(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));

    const int jobs = std::max(1, opts.jobs);
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    const auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= grid.cells.size()) return;
            const int ip = static_cast<int>(idx) / side;
            const int jp = static_cast<int>(idx) % side;
            try {
                grid.cells[idx] = run_cell(model, ip, jp, opts);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(grid.cells.size());
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    return grid;
}

void save_nmi_grid_csv(const NmiGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "p_in,p_out,nmi_full,nmi_lowrank,n_realizations\n";
    char buf[160];
    for (const NmiCell& c : grid.cells) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6f,%.6f,%d\n", c.p_in, c.p_out,
                      c.nmi_full, c.nmi_lowrank, c.realizations);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace rolesim
