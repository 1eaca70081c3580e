#include "rolesim/similarity.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include <unsupported/Eigen/KroneckerProduct>

#include "rolesim/detail/text.hpp"
#include "rolesim/errors.hpp"
#include "rolesim/rng.hpp"

namespace rolesim {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Raw propagation step A X A^T + A^T X A, no symmetrizing cleanup. Valid for
// arbitrary X; cost O(nnz(A) * n) per term.
Eigen::MatrixXd gamma_raw(const SpMat& a, const SpMat& at, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd xat = x * at;
    Eigen::MatrixXd xa = x * a;
    Eigen::MatrixXd out = a * xat;
    out.noalias() += at * xa;
    return out;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose()).eval();
}

// Spectral radius of a symmetric operator by power iteration. The estimate
// is ||M x||_2 for unit x, which is robust when the extreme eigenvalues come
// as a +/- pair. Deterministic hash-seeded start vector.
double spectral_radius(Eigen::Index dim,
                       const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
                       double rtol = 1e-10, int max_iter = 100000) {
    if (dim == 0) return 0.0;
    Eigen::VectorXd x(dim);
    rng::Stream s(0x5EEDULL);
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = s.sym();
    x /= x.norm();
    Eigen::VectorXd y(dim);
    double est_prev = -1.0;
    int hits = 0;
    for (int it = 0; it < max_iter; ++it) {
        apply(x, y);
        const double est = y.norm();
        if (est == 0.0) return 0.0;
        if (est_prev >= 0.0 && std::abs(est - est_prev) <= rtol * est) {
            if (++hits >= 2) return est;
        } else {
            hits = 0;
        }
        est_prev = est;
        x = y / est;
    }
    return est_prev;
}

struct Operators {
    SpMat a;
    SpMat at;
};

Operators build_ops(const DirectedGraph& g) {
    SpMat a = g.to_sparse();
    SpMat at = SpMat(a.transpose());
    return {std::move(a), std::move(at)};
}

}  // namespace

void save_convergence_csv(const ConvergenceReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "iteration,residual\n";
    for (std::size_t i = 0; i < report.residuals.size(); ++i)
        out << (i + 1) << ',' << detail::fmt_double(report.residuals[i]) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

ScalingParameter ScalingParameter::checked(double beta, const DirectedGraph& g, bool force) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
    const double easy = beta_max_easy(g);
    bool over = std::isfinite(easy) && beta > easy * (1.0 + 1e-12);
    if (over && !force)
        throw std::invalid_argument("beta " + detail::fmt_double(beta) +
                                    " exceeds the admissible bound " +
                                    detail::fmt_double(easy) + "; pass force to override");
    return {beta, easy, over};
}

Eigen::MatrixXd gamma_apply(const DirectedGraph& g, const Eigen::MatrixXd& x) {
    const int n = g.num_nodes();
    if (x.rows() != n || x.cols() != n)
        throw std::invalid_argument("matrix size does not match the graph");
    auto ops = build_ops(g);
    return symmetrized(gamma_raw(ops.a, ops.at, x));
}

Eigen::MatrixXd pattern_count(const DirectedGraph& g, int ell) {
    if (ell < 1) throw std::invalid_argument("pattern depth must be at least 1");
    if (ell > 12) throw std::invalid_argument("pattern depth is limited to 12");
    const int n = g.num_nodes();
    auto ops = build_ops(g);
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < ell; ++i) x = gamma_raw(ops.a, ops.at, x);
    return symmetrized(x);
}

double beta_max_easy(const DirectedGraph& g) {
    auto ops = build_ops(g);
    SpMat m = ops.a + ops.at;
    const double rho = spectral_radius(
        g.num_nodes(), [&m](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = m * x; });
    if (rho == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / rho;
}

double beta_max_exact(const DirectedGraph& g) {
    const long long n = g.num_nodes();
    if (n * n > 4096)
        throw std::invalid_argument(
            "exact bound works on n^2-dimensional vectors and is limited to n^2 <= 4096; "
            "use beta_max_easy instead");
    auto ops = build_ops(g);
    const auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        Eigen::Map<const Eigen::MatrixXd> xm(x.data(), n, n);
        Eigen::MatrixXd ym = gamma_raw(ops.a, ops.at, xm);
        y = Eigen::Map<const Eigen::VectorXd>(ym.data(), n * n);
    };
    const double rho = spectral_radius(n * n, apply);
    if (rho == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(rho);
}

double default_beta(const DirectedGraph& g) {
    const double easy = beta_max_easy(g);
    return std::isfinite(easy) ? 0.9 * easy : 1.0;
}

SimilarityResult full_similarity(const DirectedGraph& g, double beta, double tol,
                                 int max_iter, bool force_beta) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    ScalingParameter::checked(beta, g, force_beta);
    const int n = g.num_nodes();
    auto ops = build_ops(g);
    const Eigen::MatrixXd s1 =
        symmetrized(gamma_raw(ops.a, ops.at, Eigen::MatrixXd::Identity(n, n)));
    const double b2 = beta * beta;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    ConvergenceReport rep;
    for (int k = 1; k <= max_iter; ++k) {
        Eigen::MatrixXd snext = symmetrized(s1 + b2 * gamma_raw(ops.a, ops.at, s));
        const double res = (snext - s).norm();
        rep.residuals.push_back(res);
        rep.iterations = k;
        s.swap(snext);
        if (res <= tol * s.norm()) {
            rep.converged = true;
            break;
        }
    }
    return {std::move(s), std::move(rep)};
}

Eigen::MatrixXd similarity_iterate(const DirectedGraph& g, double beta, int iterations) {
    if (iterations < 0) throw std::invalid_argument("iteration count must be non-negative");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
    const int n = g.num_nodes();
    auto ops = build_ops(g);
    const Eigen::MatrixXd s1 =
        symmetrized(gamma_raw(ops.a, ops.at, Eigen::MatrixXd::Identity(n, n)));
    const double b2 = beta * beta;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < iterations; ++k)
        s = symmetrized(s1 + b2 * gamma_raw(ops.a, ops.at, s));
    return s;
}

Eigen::MatrixXd kronecker_direct_solve(const DirectedGraph& g, double beta) {
    const int n = g.num_nodes();
    if (n > 30)
        throw std::invalid_argument("direct solve materializes an n^2 x n^2 system; n <= 30");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
    const Eigen::MatrixXd ad = g.to_dense();
    Eigen::MatrixXd k = Eigen::kroneckerProduct(ad, ad);
    k = (k + k.transpose()).eval();
    const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(nn, nn) - beta * beta * k;
    const Eigen::MatrixXd s1 =
        symmetrized(ad * ad.transpose() + ad.transpose() * ad);
    // The system is symmetric, so its singular values are |eigenvalues|.
    // Singularity is judged at the identity's scale: near an admissibility
    // boundary the whole spectrum can collapse toward zero, which a
    // pivot-relative LU test would miss.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(system);
    const Eigen::VectorXd evals = es.eigenvalues();
    const double top = std::max(1.0, evals.cwiseAbs().maxCoeff());
    if (evals.cwiseAbs().minCoeff() <= 1e-12 * top)
        throw NumericError("fixed-point system is singular; beta sits at an admissibility "
                           "boundary");
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(s1.data(), nn);
    const Eigen::VectorXd sol =
        es.eigenvectors() *
        (es.eigenvectors().transpose() * rhs).cwiseQuotient(evals);
    Eigen::MatrixXd s = Eigen::Map<const Eigen::MatrixXd>(sol.data(), n, n);
    return symmetrized(s);
}

}  // namespace rolesim
