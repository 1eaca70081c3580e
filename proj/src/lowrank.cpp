#include "rolesim/lowrank.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "rolesim/detail/text.hpp"
#include "rolesim/errors.hpp"

namespace rolesim {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr double kRankCollapseRel = 1e-12;  // sigma below this * sigma_1 counts as zero
constexpr double kGapTieRel = 1e-9;         // gap below this * sigma_1 is a tie

// Flips each column so its largest-magnitude entry is positive; pins the
// sign freedom of singular vectors.
void fix_column_signs(Eigen::MatrixXd& x) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        Eigen::Index at = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double a = std::abs(x(i, c));
            if (a > best) {
                best = a;
                at = i;
            }
        }
        if (x(at, c) < 0.0) x.col(c) = -x.col(c);
    }
}

// ||A^T B||_F^2 accumulated in extended precision; entries are formed from
// the stored doubles directly, which keeps the later cancellation in the
// difference-norm formula below the convergence tolerance.
long double cross_sq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    long double acc = 0.0L;
    for (Eigen::Index ca = 0; ca < a.cols(); ++ca) {
        for (Eigen::Index cb = 0; cb < b.cols(); ++cb) {
            long double dot = 0.0L;
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                dot += static_cast<long double>(a(i, ca)) * static_cast<long double>(b(i, cb));
            acc += dot * dot;
        }
    }
    return acc;
}

struct StepOutcome {
    LowRankFactor factor;
    bool gap_tie = false;
};

StepOutcome step_impl(const SpMat& a, const SpMat& at, double beta, const LowRankFactor& xk,
                      const LowRankFactor& x1) {
    const Eigen::Index n = a.rows();
    const int r = x1.r_bound;
    const Eigen::Index cols = x1.X.cols() + 2 * xk.X.cols();
    if (cols == 0) return {LowRankFactor::zero(static_cast<int>(n), r), false};

    Eigen::MatrixXd y(n, cols);
    y.leftCols(x1.X.cols()) = x1.X;
    y.middleCols(x1.X.cols(), xk.X.cols()) = beta * (a * xk.X);
    y.rightCols(xk.X.cols()) = beta * (at * xk.X);

    const Eigen::Index t = std::min(n, cols);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, t);
    Eigen::MatrixXd rr = qr.matrixQR().topRows(t);
    for (Eigen::Index i = 1; i < t; ++i)
        rr.row(i).head(std::min(i, rr.cols())).setZero();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rr, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double sigma1 = sv.size() ? sv(0) : 0.0;
    Eigen::Index keep = 0;
    while (keep < std::min<Eigen::Index>(r, sv.size()) &&
           sv(keep) > kRankCollapseRel * sigma1 && sv(keep) > 0.0)
        ++keep;

    bool tie = false;
    if (keep == r && sv.size() > r && sv(r - 1) - sv(r) <= kGapTieRel * sigma1) tie = true;

    Eigen::MatrixXd x =
        q * (svd.matrixU().leftCols(keep) * sv.head(keep).asDiagonal());
    fix_column_signs(x);
    return {LowRankFactor{std::move(x), r}, tie};
}

}  // namespace

LowRankFactor LowRankFactor::zero(int n, int r) {
    return {Eigen::MatrixXd(n, 0), r};
}

LowRankFactor lowrank_s1(const DirectedGraph& g, int r, bool* gap_tie) {
    const int n = g.num_nodes();
    if (n > 2000) throw std::invalid_argument("dense eigendecomposition is limited to n <= 2000");
    if (r < 1 || r > n) throw std::invalid_argument("rank must lie in [1, n]");
    const Eigen::MatrixXd ad = g.to_dense();
    Eigen::MatrixXd s1 = ad * ad.transpose() + ad.transpose() * ad;
    s1 = 0.5 * (s1 + s1.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s1);
    if (es.info() != Eigen::Success)
        throw NumericError("eigendecomposition failed");
    const Eigen::VectorXd& lam = es.eigenvalues();  // ascending
    const double sigma1 = std::sqrt(std::max(lam(n - 1), 0.0));
    std::vector<std::pair<Eigen::Index, double>> kept;  // (eigvec index, sigma)
    for (int c = 0; c < r; ++c) {
        const Eigen::Index idx = n - 1 - c;
        const double sigma = std::sqrt(std::max(lam(idx), 0.0));
        if (sigma <= kRankCollapseRel * sigma1 || sigma == 0.0) break;
        kept.emplace_back(idx, sigma);
    }
    if (gap_tie) {
        // Same criterion as the iteration step, on the sqrt scale of the
        // factor's singular values.
        *gap_tie = false;
        if (static_cast<int>(kept.size()) == r && r < n) {
            const double next = std::sqrt(std::max(lam(n - 1 - r), 0.0));
            if (kept.back().second - next <= kGapTieRel * sigma1) *gap_tie = true;
        }
    }
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c)
        x.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(kept[c].first) * kept[c].second;
    fix_column_signs(x);
    return {std::move(x), r};
}

Eigen::MatrixXd assemble_step_matrix(const DirectedGraph& g, double beta,
                                     const LowRankFactor& xk, const LowRankFactor& x1) {
    const int n = g.num_nodes();
    if (xk.n() != n || x1.n() != n)
        throw std::invalid_argument("factor sizes do not match the graph");
    SpMat a = g.to_sparse();
    SpMat at = SpMat(a.transpose());
    Eigen::MatrixXd y(n, x1.X.cols() + 2 * xk.X.cols());
    y.leftCols(x1.X.cols()) = x1.X;
    y.middleCols(x1.X.cols(), xk.X.cols()) = beta * (a * xk.X);
    y.rightCols(xk.X.cols()) = beta * (at * xk.X);
    return y;
}

LowRankFactor lowrank_step(const DirectedGraph& g, double beta, const LowRankFactor& xk,
                           const LowRankFactor& x1) {
    const int n = g.num_nodes();
    if (xk.n() != n || x1.n() != n)
        throw std::invalid_argument("factor sizes do not match the graph");
    if (xk.r_bound != x1.r_bound)
        throw std::invalid_argument("factors carry different rank bounds");
    SpMat a = g.to_sparse();
    SpMat at = SpMat(a.transpose());
    return step_impl(a, at, beta, xk, x1).factor;
}

LowRankResult lowrank_similarity(const DirectedGraph& g, int r, double beta, double tol,
                                 int max_iter, bool force_beta) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    ScalingParameter::checked(beta, g, force_beta);
    const int n = g.num_nodes();
    bool base_tie = false;
    const LowRankFactor x1 = lowrank_s1(g, r, &base_tie);
    SpMat a = g.to_sparse();
    SpMat at = SpMat(a.transpose());

    LowRankResult out;
    out.factor = LowRankFactor::zero(n, r);
    long double norm_sq_prev = 0.0L;  // ||X_k X_k^T||_F^2
    bool warned = false;
    auto flag_tie = [&] {
        out.spectral_gap_warning = true;
        if (!warned) {
            std::cerr << "warning: near-tied singular values at the truncation rank; "
                         "the kept subspace is ill-determined\n";
            warned = true;
        }
    };
    if (base_tie) flag_tie();
    for (int k = 1; k <= max_iter; ++k) {
        StepOutcome st = step_impl(a, at, beta, out.factor, x1);
        if (st.gap_tie) flag_tie();
        const long double norm_sq_next = cross_sq(st.factor.X, st.factor.X);
        long double res_sq = norm_sq_next + norm_sq_prev - 2.0L * cross_sq(out.factor.X, st.factor.X);
        if (res_sq < 0.0L) res_sq = 0.0L;
        const double res = static_cast<double>(std::sqrt(res_sq));
        out.report.residuals.push_back(res);
        out.report.iterations = k;
        const double prev_norm = static_cast<double>(std::sqrt(norm_sq_prev));
        out.factor = std::move(st.factor);
        norm_sq_prev = norm_sq_next;
        if (res <= tol * prev_norm) {
            out.report.converged = true;
            break;
        }
    }
    return out;
}

double factored_norm(const LowRankFactor& a) {
    return static_cast<double>(std::sqrt(cross_sq(a.X, a.X)));
}

double factored_diff_norm(const LowRankFactor& a, const LowRankFactor& b) {
    if (a.n() != b.n()) throw std::invalid_argument("factor sizes differ");
    long double s = cross_sq(a.X, a.X) + cross_sq(b.X, b.X) - 2.0L * cross_sq(a.X, b.X);
    if (s < 0.0L) s = 0.0L;
    return static_cast<double>(std::sqrt(s));
}

Eigen::MatrixXd materialize(const LowRankFactor& f) {
    return f.X * f.X.transpose();
}

void save_factor_csv(const LowRankFactor& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "#dim " << f.n() << ' ' << f.rank() << "\n";
    for (Eigen::Index i = 0; i < f.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < f.X.cols(); ++j) {
            if (j) out << ',';
            out << detail::fmt_double(f.X(i, j));
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

LowRankFactor load_factor_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    std::string_view header = detail::trim_cr(line);
    if (header.substr(0, 5) != "#dim ")
        throw IoError(path + ":1: expected \"#dim n r\" header");
    auto fields = detail::split(header.substr(5), ' ');
    if (fields.size() != 2) throw IoError(path + ":1: expected \"#dim n r\" header");
    auto n = detail::parse_int(fields[0]);
    auto r = detail::parse_int(fields[1]);
    if (!n || !r || *n < 0 || *r < 0 || *r > *n)
        throw IoError(path + ":1: malformed dimensions");
    Eigen::MatrixXd x(*n, *r);
    for (long long i = 0; i < *n; ++i) {
        if (!std::getline(in, line)) throw IoError(path + ": truncated factor");
        auto row = detail::split(detail::trim_cr(line), ',');
        if (*r == 0) {
            if (!(row.size() == 1 && row[0].empty()))
                throw IoError(path + ":" + std::to_string(i + 2) + ": expected empty row");
            continue;
        }
        if (static_cast<long long>(row.size()) != *r)
            throw IoError(path + ":" + std::to_string(i + 2) + ": expected " +
                          std::to_string(*r) + " values");
        for (long long j = 0; j < *r; ++j) {
            auto v = detail::parse_double(row[static_cast<std::size_t>(j)]);
            if (!v || !std::isfinite(*v))
                throw IoError(path + ":" + std::to_string(i + 2) + ": malformed value");
            x(i, j) = *v;
        }
    }
    return {std::move(x), static_cast<int>(*r)};
}

}  // namespace rolesim
