#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rolesim/graph.hpp"

namespace rolesim {

// Trace of a fixed-point iteration. residuals[k-1] is the Frobenius norm of
// the k-th update step.
struct ConvergenceReport {
    int iterations = 0;
    std::vector<double> residuals;
    bool converged = false;
};

// "iteration,residual" CSV, one row per iteration.
void save_convergence_csv(const ConvergenceReport& report, const std::string& path);

// Scaling parameter bundled with the admissibility bound it was checked
// against. Values beyond the bound require force and are flagged.
struct ScalingParameter {
    double value = 0.0;
    double easy_bound = 0.0;
    bool overridden = false;

    static ScalingParameter checked(double beta, const DirectedGraph& g, bool force = false);
};

// One propagation step: A X A^T + A^T X A, symmetrized to absorb roundoff.
// X is expected symmetric; the result is then symmetric and the map is
// linear and positivity-preserving.
Eigen::MatrixXd gamma_apply(const DirectedGraph& g, const Eigen::MatrixXd& x);

// Pattern counts at depth ell: ell = 1 counts common children plus common
// parents; each further level expands every walk endpoint by one step in
// both edge directions. Guarded to ell <= 12.
Eigen::MatrixXd pattern_count(const DirectedGraph& g, int ell);

// Largest admissible scaling from the spectral radius of A + A^T. Cheap at
// any size; +infinity for an edgeless graph. Always at or below the exact
// bound.
double beta_max_easy(const DirectedGraph& g);

// Exact admissibility threshold, from the spectral radius of the structure
// operator behind the fixed point. Works on n^2-dimensional vectors, so it
// is guarded to n^2 <= 4096; beyond that use beta_max_easy.
double beta_max_exact(const DirectedGraph& g);

// Default scaling: 90% of the easy bound (1.0 for an edgeless graph).
double default_beta(const DirectedGraph& g);

struct SimilarityResult {
    Eigen::MatrixXd matrix;
    ConvergenceReport report;
};

// Similarity fixed point S = S1 + beta^2 (A S A^T + A^T S A) by iteration
// from S = 0, where S1 = A A^T + A^T A. Converged when the step norm falls
// to tol * ||S||_F. beta must respect the easy bound unless force_beta.
SimilarityResult full_similarity(const DirectedGraph& g, double beta, double tol = 1e-9,
                                 int max_iter = 10000, bool force_beta = false);

// The exact k-th iterate of the same recurrence (no convergence test).
Eigen::MatrixXd similarity_iterate(const DirectedGraph& g, double beta, int iterations);

// Independent route to the same fixed point: materializes the n^2 x n^2
// linear system via Kronecker products and solves it directly. Reference
// oracle only; guarded to n <= 30. Throws NumericError when the system is
// singular (beta at an admissibility boundary).
Eigen::MatrixXd kronecker_direct_solve(const DirectedGraph& g, double beta);

}  // namespace rolesim
