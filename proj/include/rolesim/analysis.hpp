#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rolesim/benchgen.hpp"
#include "rolesim/graph.hpp"

namespace rolesim {

// Normalized mutual information, 2 I(a,b) / (H(a) + H(b)) with natural logs.
// Conventions for degenerate partitions: both entropies zero -> 1.0, exactly
// one zero -> 0.0. Symmetric, invariant to cluster relabeling, range [0, 1].
double nmi(const Partition& a, const Partition& b);

struct RankSweepRow {
    int r = 0;
    double full_gap = 0.0;   // ||S* - S^(r)||_F
    double step_norm = 0.0;  // ||S^(r) - S^(r+1)||_F
};

struct RankSweepReport {
    std::vector<RankSweepRow> rows;  // r = 1..r_max
    std::optional<int> knee;
};

// Computes the full similarity once, then rank-r similarities for
// r = 1..r_max+1, and reports the gap and step profile. The knee is the
// smallest r maximizing step_norm(r-1)/step_norm(r), reported only when that
// ratio exceeds 10; step norms below 1e-15 * ||S*||_F are clamped before
// dividing. Requires r_max + 1 <= n and is guarded to n <= 2000.
RankSweepReport rank_sweep(const DirectedGraph& g, int r_max,
                           std::optional<double> beta = std::nullopt, double tol = 1e-9,
                           int max_iter = 10000);

// CSV with a "#knee <r|none>" comment line, then "r,full_gap,step_norm".
void save_rank_sweep_csv(const RankSweepReport& report, const std::string& path);

struct NmiCell {
    double p_in = 0.0;
    double p_out = 0.0;
    double nmi_full = 0.0;     // mean over realizations, full-rank pipeline
    double nmi_lowrank = 0.0;  // mean over realizations, rank-bounded pipeline
    int realizations = 0;
};

struct NmiGrid {
    double step = 0.0;
    std::vector<NmiCell> cells;  // p_in major, p_out minor, both ascending
};

struct GridOptions {
    double step = 0.05;  // must divide 1 evenly
    int realizations = 20;
    int rank = 10;
    std::uint64_t seed_base = 0;
    double resolution = 1.0;
    double tol = 1e-9;
    int max_iter = 10000;
    int jobs = 1;  // worker threads; output is identical for any value
};

// Sweeps (p_in, p_out) over {0, step, ..., 1}^2. Each realization draws an
// instance with seed hash(seed_base, i_pin, i_pout, t) and scores both the
// full-rank and the rank-bounded pipeline against the planted truth.
NmiGrid nmi_grid(const RoleModel& model, const GridOptions& opts = {});

// CSV "p_in,p_out,nmi_full,nmi_lowrank,n_realizations". Byte-stable for a
// fixed seed_base regardless of jobs.
void save_nmi_grid_csv(const NmiGrid& grid, const std::string& path);

}  // namespace rolesim
