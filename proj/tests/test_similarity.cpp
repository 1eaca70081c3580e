#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "rolesim/benchgen.hpp"
#include "rolesim/errors.hpp"
#include "rolesim/rng.hpp"
#include "rolesim/similarity.hpp"
#include "test_util.hpp"

using namespace rolesim;

namespace {

DirectedGraph identity2() { return DirectedGraph(2, {{0, 0, 1.0}, {1, 1, 1.0}}); }
DirectedGraph single_edge() { return DirectedGraph(2, {{0, 1, 1.0}}); }

DirectedGraph block_cycle(int k, int m) {
    RoleModel model(preset_role_graph(RolePreset::cycle, k), std::vector<int>(k, m));
    return generate(model, 1.0, 0.0, 0).graph;
}

}  // namespace

TEST_CASE("gamma matches the entrywise definition") {
    rng::Stream s(21);
    for (int t = 0; t < 10; ++t) {
        const int n = 2 + static_cast<int>(s.below(5));
        DirectedGraph g = testutil::random_digraph(s, n, 0.5, true);
        Eigen::MatrixXd x = testutil::random_symmetric(s, n);
        Eigen::MatrixXd expect = testutil::gamma_entrywise(g.to_dense(), x);
        CHECK((gamma_apply(g, x) - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
    }
}

TEST_CASE("gamma edge cases") {
    DirectedGraph zero(3, {});
    CHECK(gamma_apply(zero, Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
    // One edge: the only shared-neighbor patterns are each node with itself.
    CHECK((gamma_apply(single_edge(), Eigen::MatrixXd::Identity(2, 2)) -
           Eigen::MatrixXd::Identity(2, 2))
              .norm() == 0.0);
    CHECK_THROWS_AS(gamma_apply(zero, Eigen::MatrixXd::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("gamma is linear and preserves symmetry") {
    rng::Stream s(22);
    const int n = 6;
    DirectedGraph g = testutil::random_digraph(s, n, 0.4, true);
    Eigen::MatrixXd x = testutil::random_symmetric(s, n);
    Eigen::MatrixXd y = testutil::random_symmetric(s, n);
    Eigen::MatrixXd lhs = gamma_apply(g, 2.0 * x + 3.0 * y);
    Eigen::MatrixXd rhs = 2.0 * gamma_apply(g, x) + 3.0 * gamma_apply(g, y);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    CHECK((lhs - lhs.transpose()).norm() <= 1e-12 * (1.0 + lhs.norm()));
}

TEST_CASE("pattern counts match brute-force word enumeration") {
    rng::Stream s(23);
    for (int t = 0; t < 8; ++t) {
        const int n = 2 + static_cast<int>(s.below(7));
        DirectedGraph g = testutil::random_digraph(s, n, 0.4);
        Eigen::MatrixXd a = g.to_dense();
        for (int ell = 1; ell <= 4; ++ell) {
            Eigen::MatrixXd expect = testutil::pattern_count_words(a, ell);
            CHECK((pattern_count(g, ell) - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
        }
    }
}

TEST_CASE("depth-2 pattern count equals its four-term expansion") {
    rng::Stream s(24);
    DirectedGraph g = testutil::random_digraph(s, 6, 0.5);
    Eigen::MatrixXd a = g.to_dense();
    Eigen::MatrixXd at = a.transpose();
    Eigen::MatrixXd expect = (a * a) * (a * a).transpose() + (a * at) * (a * at) +
                             (at * a) * (at * a) + (at * at) * (at * at).transpose();
    CHECK((pattern_count(g, 2) - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
}

TEST_CASE("pattern count for the single edge stays the identity") {
    for (int ell = 1; ell <= 3; ++ell)
        CHECK((pattern_count(single_edge(), ell) - Eigen::MatrixXd::Identity(2, 2)).norm() ==
              0.0);
}

TEST_CASE("pattern count guards") {
    CHECK_THROWS_AS(pattern_count(single_edge(), 0), std::invalid_argument);
    CHECK_THROWS_AS(pattern_count(single_edge(), -1), std::invalid_argument);
    CHECK_THROWS_AS(pattern_count(single_edge(), 13), std::invalid_argument);
}

TEST_CASE("easy admissibility bound on known spectra") {
    CHECK(beta_max_easy(identity2()) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(beta_max_easy(single_edge()) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::isinf(beta_max_easy(DirectedGraph(3, {}))));
    // Regular block cycle, k=3, m=2: A + A^T is 4-regular.
    CHECK(beta_max_easy(block_cycle(3, 2)) == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("exact admissibility bound on known spectra") {
    CHECK(beta_max_exact(identity2()) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
    CHECK(beta_max_exact(single_edge()) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::isinf(beta_max_exact(DirectedGraph(3, {}))));
}

TEST_CASE("exact bound is guarded by problem size") {
    DirectedGraph big(65, {{0, 1, 1.0}});
    CHECK_THROWS_WITH_AS(beta_max_exact(big), doctest::Contains("beta_max_easy"),
                         std::invalid_argument);
}

TEST_CASE("easy bound never exceeds the exact bound") {
    rng::Stream s(25);
    for (int t = 0; t < 15; ++t) {
        const int n = 2 + static_cast<int>(s.below(9));
        DirectedGraph g = testutil::random_digraph(s, n, 0.35, t % 2 == 0);
        const double easy = beta_max_easy(g);
        const double exact = beta_max_exact(g);
        if (std::isinf(easy)) {
            CHECK(std::isinf(exact));
        } else {
            CHECK(easy <= exact * (1.0 + 1e-6));
        }
    }
}

TEST_CASE("scaling parameter validation") {
    DirectedGraph g = single_edge();  // easy bound 1.0
    ScalingParameter ok = ScalingParameter::checked(0.5, g);
    CHECK(ok.value == 0.5);
    CHECK(ok.easy_bound == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_FALSE(ok.overridden);
    CHECK_THROWS_AS(ScalingParameter::checked(2.0, g), std::invalid_argument);
    CHECK(ScalingParameter::checked(2.0, g, true).overridden);
    CHECK_THROWS_AS(ScalingParameter::checked(0.0, g), std::invalid_argument);
    CHECK_THROWS_AS(ScalingParameter::checked(-1.0, g), std::invalid_argument);
    CHECK_THROWS_AS(
        ScalingParameter::checked(std::numeric_limits<double>::infinity(), g),
        std::invalid_argument);
    // Edgeless graph: every finite beta is admissible.
    CHECK_FALSE(ScalingParameter::checked(5.0, DirectedGraph(2, {})).overridden);
}

TEST_CASE("default beta sits at 90% of the easy bound") {
    CHECK(default_beta(single_edge()) == doctest::Approx(0.9).epsilon(1e-8));
    CHECK(default_beta(DirectedGraph(2, {})) == 1.0);
}

TEST_CASE("fixed point for A = identity: scalar closed form") {
    // Gamma doubles any X, so S = 2I + 2 beta^2 S, i.e. S = 2I/(1 - 2 beta^2).
    SimilarityResult res = full_similarity(identity2(), 0.5, 1e-12);
    CHECK(res.report.converged);
    CHECK((res.matrix - 4.0 * Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-8);
    Eigen::MatrixXd direct = kronecker_direct_solve(identity2(), 0.5);
    CHECK((direct - 4.0 * Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("edgeless graph has zero similarity") {
    DirectedGraph zero(4, {});
    SimilarityResult res = full_similarity(zero, 1.0);
    CHECK(res.report.converged);
    CHECK(res.matrix.norm() == 0.0);
    CHECK(kronecker_direct_solve(zero, 0.5).norm() == 0.0);
}

TEST_CASE("iteration agrees with the direct solve") {
    rng::Stream s(26);
    for (int t = 0; t < 10; ++t) {
        const int n = 3 + static_cast<int>(s.below(6));
        DirectedGraph g = testutil::random_digraph(s, n, 0.35);
        if (g.num_edges() == 0) continue;
        const double beta = 0.5 * beta_max_easy(g);
        SimilarityResult iter = full_similarity(g, beta, 1e-12);
        REQUIRE(iter.report.converged);
        Eigen::MatrixXd direct = kronecker_direct_solve(g, beta);
        CHECK((iter.matrix - direct).norm() <= 1e-9 * (1.0 + direct.norm()));
    }
}

TEST_CASE("direct solve satisfies the fixed-point equation") {
    rng::Stream s(27);
    DirectedGraph g = testutil::random_digraph(s, 7, 0.4, true);
    const double beta = 0.5 * beta_max_easy(g);
    Eigen::MatrixXd sstar = kronecker_direct_solve(g, beta);
    Eigen::MatrixXd a = g.to_dense();
    Eigen::MatrixXd s1 = a * a.transpose() + a.transpose() * a;
    Eigen::MatrixXd resid = sstar - s1 - beta * beta * gamma_apply(g, sstar);
    CHECK(resid.norm() <= 1e-10 * (1.0 + sstar.norm()));
}

TEST_CASE("direct solve rejects a singular system") {
    // For A = I the system matrix is I - 2 beta^2 I, exactly singular at
    // beta = 1/sqrt(2).
    CHECK_THROWS_AS(kronecker_direct_solve(identity2(), 1.0 / std::sqrt(2.0)), NumericError);
    DirectedGraph big(31, {{0, 1, 1.0}});
    CHECK_THROWS_AS(kronecker_direct_solve(big, 0.1), std::invalid_argument);
}

TEST_CASE("truncated iterates expand into the pattern-count series") {
    rng::Stream s(28);
    for (int t = 0; t < 6; ++t) {
        const int n = 3 + static_cast<int>(s.below(6));
        DirectedGraph g = testutil::random_digraph(s, n, 0.4);
        if (g.num_edges() == 0) continue;
        const double beta = 0.5 * beta_max_easy(g);
        for (int k = 1; k <= 4; ++k) {
            Eigen::MatrixXd sk = similarity_iterate(g, beta, k);
            Eigen::MatrixXd series = Eigen::MatrixXd::Zero(n, n);
            for (int ell = 1; ell <= k; ++ell)
                series += std::pow(beta, 2 * (ell - 1)) * pattern_count(g, ell);
            CHECK((sk - series).norm() <= 1e-10 * (1.0 + series.norm()));
        }
    }
}

TEST_CASE("beta validation on the full iteration") {
    DirectedGraph g = single_edge();
    CHECK_THROWS_AS(full_similarity(g, 1.5), std::invalid_argument);
    // Forced beta above the bound diverges and must report honestly.
    SimilarityResult res = full_similarity(g, 1.5, 1e-9, 50, true);
    CHECK_FALSE(res.report.converged);
    CHECK(res.report.iterations == 50);
}

TEST_CASE("convergence report traces every iteration") {
    DirectedGraph g = block_cycle(3, 2);
    SimilarityResult res = full_similarity(g, 0.2, 1e-9);
    CHECK(res.report.converged);
    CHECK(res.report.iterations == static_cast<int>(res.report.residuals.size()));
    CHECK(res.report.residuals.front() > res.report.residuals.back());

    auto path = testutil::scratch_dir("similarity") / "conv.csv";
    save_convergence_csv(res.report, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "iteration,residual");
}

TEST_CASE("residuals contract at the operator rate") {
    rng::Stream s(29);
    for (int t = 0; t < 5; ++t) {
        const int n = 3 + static_cast<int>(s.below(5));
        DirectedGraph g = testutil::random_digraph(s, n, 0.4);
        if (g.num_edges() == 0) continue;
        const double beta = 0.5 * beta_max_easy(g);
        const double exact = beta_max_exact(g);
        const double q = (beta * beta) / (exact * exact);  // beta^2 rho
        SimilarityResult res = full_similarity(g, beta, 1e-11);
        for (std::size_t k = 1; k < res.report.residuals.size(); ++k)
            CHECK(res.report.residuals[k] <=
                  q * res.report.residuals[k - 1] * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("similarity is symmetric positive semidefinite") {
    rng::Stream s(30);
    for (int t = 0; t < 8; ++t) {
        const int n = 3 + static_cast<int>(s.below(8));
        DirectedGraph g = testutil::random_digraph(s, n, 0.3, true);
        if (g.num_edges() == 0) continue;
        SimilarityResult res = full_similarity(g, default_beta(g));
        REQUIRE(res.report.converged);
        CHECK((res.matrix - res.matrix.transpose()).norm() <=
              1e-12 * std::max(1.0, res.matrix.norm()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.matrix);
        const double top = std::max(std::abs(es.eigenvalues()(n - 1)),
                                    std::abs(es.eigenvalues()(0)));
        CHECK(es.eigenvalues()(0) >= -1e-9 * top);
    }
}

TEST_CASE("similarity commutes with node relabeling") {
    rng::Stream s(31);
    for (int t = 0; t < 5; ++t) {
        const int n = 4 + static_cast<int>(s.below(5));
        DirectedGraph g = testutil::random_digraph(s, n, 0.4);
        if (g.num_edges() == 0) continue;
        auto perm = testutil::random_permutation(s, n);
        const double beta = 0.5 * beta_max_easy(g);
        Eigen::MatrixXd sg = full_similarity(g, beta, 1e-12).matrix;
        Eigen::MatrixXd sp = full_similarity(permute(g, perm), beta, 1e-12).matrix;
        Eigen::MatrixXd expected(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                expected(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) =
                    sg(i, j);
        CHECK((sp - expected).norm() <= 1e-9 * (1.0 + expected.norm()));
    }
}
