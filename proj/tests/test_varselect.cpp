#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "chaos/varselect.hpp"
#include "oracles.hpp"

using namespace chaos;

TEST(Pca, CollinearColumnsGiveZeroEigenvalue) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20; ++i) rows.push_back({double(i % 7), 2.0 * (i % 7)});
    const auto dec = pca(MetricMatrix::from_rows(rows));
    EXPECT_NEAR(dec.eigenvalues(1), 0.0, 1e-10);
    EXPECT_GT(dec.eigenvalues(0), 0.0);
}

TEST(Pca, IsotropicDataHasEqualEigenvalues) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0, 1);
    std::vector<std::vector<double>> rows(20000, std::vector<double>(3));
    for (auto& r : rows)
        for (auto& v : r) v = g(rng);
    const auto dec = pca(MetricMatrix::from_rows(rows));
    EXPECT_NEAR(dec.eigenvalues(0) / dec.eigenvalues(2), 1.0, 0.1);
}

TEST(Pca, InvariantsHold) {
    std::mt19937_64 rng(3);
    const auto rows = oracle::collinear6(3);
    const auto x = MetricMatrix::from_rows(rows);
    const auto dec = pca(x);
    const Eigen::MatrixXd w = dec.loadings;
    EXPECT_TRUE((w.transpose() * w).isIdentity(1e-8));
    for (Eigen::Index i = 0; i + 1 < dec.eigenvalues.size(); ++i)
        EXPECT_GE(dec.eigenvalues(i), dec.eigenvalues(i + 1));
    EXPECT_GE(dec.eigenvalues.minCoeff(), -1e-10);

    const Eigen::MatrixXd xc = centered_data(x);
    EXPECT_LT((xc * w * w.transpose() - xc).cwiseAbs().maxCoeff(), 1e-6);
    const double tr = (xc.transpose() * xc).trace() / double(xc.rows() - 1);
    EXPECT_NEAR(dec.eigenvalues.sum(), tr, 1e-9 * tr);
}

TEST(Pca, NeedsTwoRows) {
    EXPECT_THROW(pca(MetricMatrix::from_rows({{1.0, 2.0}})), ParameterError);
}

TEST(Gcd, FullSetIsOne) {
    const auto x = MetricMatrix::from_rows(oracle::collinear6(4));
    const std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
    EXPECT_NEAR(gcd_score(x, all, 6), 1.0, 1e-12);
}

TEST(Gcd, OrthogonalSubspaceIsZero) {
    // Column 0 dominates the variance; column 1 is orthogonal to it.
    const auto x = MetricMatrix::from_columns({{10, -10, 10, -10}, {1, 1, -1, -1}});
    const std::vector<std::size_t> s{1};
    EXPECT_NEAR(gcd_score(x, s, 1), 0.0, 1e-12);
}

TEST(Gcd, MatchesSvdOracle) {
    const auto rows = oracle::collinear6(5);
    const auto x = MetricMatrix::from_rows(rows);
    std::vector<std::vector<std::size_t>> subsets;
    std::vector<std::size_t> cur;
    for (std::size_t k = 1; k <= 6; ++k) {
        subsets.clear();
        oracle::combinations(6, k, 0, cur, subsets);
        const GcdEvaluator gcd(x, k);
        for (const auto& s : subsets) EXPECT_NEAR(gcd(s), oracle::gcd(rows, s, k), 1e-9);
    }
}

TEST(Gcd, OrderInvariant) {
    const auto x = MetricMatrix::from_rows(oracle::collinear6(6));
    const std::vector<std::size_t> a{0, 3, 5}, b{5, 0, 3};
    EXPECT_NEAR(gcd_score(x, a, 3), gcd_score(x, b, 3), 1e-14);
}

TEST(Gcd, RejectsBadArgs) {
    const auto x = MetricMatrix::from_rows(oracle::collinear6(6));
    const std::vector<std::size_t> none;
    const std::vector<std::size_t> one{0};
    EXPECT_THROW(gcd_score(x, none, 1), ParameterError);
    EXPECT_THROW(gcd_score(x, one, 7), ParameterError);
}

TEST(Anneal, AcceptanceBoundary) {
    EXPECT_EQ(acceptance_probability(0.5, 0.5, 0.1), 1.0);
    EXPECT_EQ(acceptance_probability(0.7, 0.5, 0.1), 1.0);
    EXPECT_DOUBLE_EQ(acceptance_probability(0.4, 0.5, 0.1), std::exp(-1.0));
}

TEST(Anneal, FullSetWhenKEqualsM) {
    const auto x = MetricMatrix::from_rows(oracle::collinear6(7));
    const auto best = anneal_select(x, 6, AnnealConfig{});
    EXPECT_EQ(best.indices, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
    EXPECT_NEAR(best.gcd, 1.0, 1e-12);
}

TEST(Anneal, FindsExhaustiveOptimum) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto rows = oracle::collinear6(seed);
        const auto want = oracle::exhaustive_gcd(rows, 3);
        AnnealConfig cfg;
        cfg.seed = seed;
        const auto got = anneal_select(MetricMatrix::from_rows(rows), 3, cfg);
        EXPECT_EQ(got.indices, want.subset) << "seed " << seed;
        EXPECT_NEAR(got.gcd, want.gcd, 1e-9);
        EXPECT_TRUE(std::is_sorted(got.indices.begin(), got.indices.end()));
    }
}

TEST(Anneal, DeterministicForSeed) {
    const auto x = MetricMatrix::from_rows(oracle::latent10(1));
    AnnealConfig cfg;
    cfg.seed = 99;
    cfg.max_iterations = 300;
    const auto a = anneal_select(x, 4, cfg);
    const auto b = anneal_select(x, 4, cfg);
    EXPECT_EQ(a.indices, b.indices);
    EXPECT_EQ(a.gcd, b.gcd);
}

TEST(Anneal, RejectsBadConfig) {
    const auto x = MetricMatrix::from_rows(oracle::collinear6(1));
    AnnealConfig cfg;
    cfg.cooling_rate = 1.0;
    EXPECT_THROW(anneal_select(x, 3, cfg), ParameterError);
    EXPECT_THROW(anneal_select(x, 0, AnnealConfig{}), ParameterError);
}

TEST(Elbow, FlattensAtLatentRank) {
    const auto x = MetricMatrix::from_rows(oracle::latent10(2));
    AnnealConfig cfg;
    cfg.max_iterations = 2000;
    const auto rows = elbow_report(x, cfg);
    ASSERT_EQ(rows.size(), 10u);
    // First k whose best subset reproduces the principal subspace.
    const auto elbow = std::find_if(rows.begin(), rows.end(),
                                    [](const auto& r) { return r.best.gcd >= 1.0 - 1e-4; });
    ASSERT_NE(elbow, rows.end());
    EXPECT_EQ(elbow->k, 5u);
    EXPECT_GE(rows[4].best.gcd, 1.0 - 1e-4);
    EXPECT_NEAR(rows[9].best.gcd, 1.0, 1e-9);
    for (std::size_t k = 6; k < 10; ++k) EXPECT_LT(rows[k - 1].best.gcd, 1.0 - 1e-4);
}
