#pragma once

#include <string>

#include <Eigen/Dense>

#include "rolesim/graph.hpp"
#include "rolesim/similarity.hpp"

namespace rolesim {

// Rank-bounded factor of a positive semidefinite matrix: S ~ X X^T where the
// columns of X are mutually orthogonal and ordered by non-increasing norm
// (singular-value scaling). X may hold fewer than r_bound columns when the
// factored matrix collapses to lower rank.
struct LowRankFactor {
    Eigen::MatrixXd X;
    int r_bound = 0;

    int n() const { return static_cast<int>(X.rows()); }
    int rank() const { return static_cast<int>(X.cols()); }

    static LowRankFactor zero(int n, int r);
};

// Best rank-r factor of S1 = A A^T + A^T A via dense eigendecomposition.
// Guarded to n <= 2000; requires 1 <= r <= n. When gap_tie is given it is set
// to whether the truncation cut through a (near) tied pair of eigenvalues,
// i.e. the kept subspace is ill-determined.
LowRankFactor lowrank_s1(const DirectedGraph& g, int r, bool* gap_tie = nullptr);

// The tall matrix [X1 | beta A Xk | beta A^T Xk] whose outer square equals
// S1^(r) + beta^2 (A Xk Xk^T A^T + A^T Xk Xk^T A). Exposed for inspection.
Eigen::MatrixXd assemble_step_matrix(const DirectedGraph& g, double beta,
                                     const LowRankFactor& xk, const LowRankFactor& x1);

// One projected iteration step: orthogonalize the assembled matrix (QR),
// truncate its small SVD to rank r, and rescale. The result is the best
// rank-r approximation of the stepped matrix.
LowRankFactor lowrank_step(const DirectedGraph& g, double beta, const LowRankFactor& xk,
                           const LowRankFactor& x1);

struct LowRankResult {
    LowRankFactor factor;
    ConvergenceReport report;
    // Set when the singular values at the truncation boundary were (near)
    // tied at some step, which makes the kept subspace ill-determined.
    bool spectral_gap_warning = false;
};

// Rank-r similarity via repeated projected steps from X = 0. Convergence is
// measured in factored form: ||X_{k+1} X_{k+1}^T - X_k X_k^T||_F, computed
// from small Gram matrices without materializing any n x n product.
LowRankResult lowrank_similarity(const DirectedGraph& g, int r, double beta,
                                 double tol = 1e-9, int max_iter = 10000,
                                 bool force_beta = false);

// ||A A^T||_F and ||A A^T - B B^T||_F from Gram matrices (extended-precision
// accumulation; the difference norm loses all digits in plain double once it
// falls below ~1e-8 of the operand norms).
double factored_norm(const LowRankFactor& a);
double factored_diff_norm(const LowRankFactor& a, const LowRankFactor& b);

// Dense X X^T. Callers guard size; see similarity_graph for the bounded path.
Eigen::MatrixXd materialize(const LowRankFactor& f);

// Factor CSV: "#dim n r" header, then n rows of r values.
void save_factor_csv(const LowRankFactor& f, const std::string& path);
LowRankFactor load_factor_csv(const std::string& path);

}  // namespace rolesim
