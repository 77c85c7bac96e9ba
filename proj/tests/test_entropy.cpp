#include <chrono>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "chaos/aging.hpp"
#include "chaos/entropy.hpp"
#include "chaos/stats.hpp"
#include "oracles.hpp"

using namespace chaos;

namespace {

EntropyConfig small_cfg(std::size_t n, std::size_t scales = 10, std::size_t m = 2) {
    EntropyConfig c;
    c.m = m;
    c.scales = scales;
    c.window.length = n;
    return c;
}

} // namespace

TEST(SampleEntropy, ConstantSeriesIsZero) {
    const std::vector<double> x(100, 4.2);
    const auto se = sample_entropy(x, 2, 0.1);
    ASSERT_TRUE(se.defined());
    EXPECT_EQ(se.value, 0.0);
    EXPECT_EQ(se.counts.a, se.counts.b);
}

TEST(SampleEntropy, RampHasNoMatches) {
    const std::vector<double> x{1, 2, 3, 4};
    const auto se = sample_entropy(x, 2, 0.5);
    EXPECT_FALSE(se.defined());
    EXPECT_EQ(se.counts.b, 0u);
    EXPECT_TRUE(std::isnan(se.value));
}

TEST(SampleEntropy, RejectsBadArgs) {
    const std::vector<double> x{1, 2, 3};
    EXPECT_THROW(sample_entropy(x, 2, 0.5), ParameterError);
    EXPECT_THROW(sample_entropy(x, 1, 0.0), ParameterError);
    EXPECT_THROW(sample_entropy(x, 0, 0.5), ParameterError);
}

TEST(SampleEntropy, MatchesBruteForce) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rows = oracle::random_rows(rng, 60 + trial, 1, 8);
        std::vector<double> x;
        for (const auto& r : rows) x.push_back(r[0]);
        for (std::size_t m = 1; m <= 3; ++m) {
            const auto want = oracle::sampen_counts(rows, m, 0.2);
            const auto got = sample_entropy(x, m, 0.2);
            EXPECT_EQ(got.counts.a, want.a);
            EXPECT_EQ(got.counts.b, want.b);
        }
    }
}

TEST(ExtendedSampleEntropy, ReducesToScalarCase) {
    std::mt19937_64 rng(22);
    const auto rows = oracle::random_rows(rng, 80, 1);
    const auto x = MetricMatrix::from_rows(rows);
    const auto a = extended_sample_entropy(x, 2, 0.2);
    const auto b = sample_entropy(x.column(0), 2, 0.2);
    EXPECT_EQ(a.counts, b.counts);
}

TEST(ExtendedSampleEntropy, IdenticalRowsGiveZero) {
    const auto x = MetricMatrix::from_rows(std::vector<std::vector<double>>(30, {1, 2, 3}));
    EXPECT_EQ(extended_sample_entropy(x, 2, 0.01).value, 0.0);
}

TEST(ExtendedSampleEntropy, ThreeColumnsMatchBruteForce) {
    std::mt19937_64 rng(23);
    const auto rows = oracle::random_rows(rng, 50, 3, 4);
    const auto got = extended_sample_entropy(MetricMatrix::from_rows(rows), 2, 0.3);
    const auto want = oracle::sampen_counts(rows, 2, 0.3);
    EXPECT_EQ(got.counts.a, want.a);
    EXPECT_EQ(got.counts.b, want.b);
    EXPECT_GT(want.a, 0u);
}

TEST(ExtendedSampleEntropy, RandomizedOracleSweep) {
    std::mt19937_64 rng(24);
    std::uniform_int_distribution<std::size_t> n_dist(5, 120), p_dist(1, 4), m_dist(1, 3);
    std::uniform_real_distribution<double> r_dist(0.05, 0.6);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = m_dist(rng);
        const std::size_t n = std::max(n_dist(rng), m + 2);
        const auto rows = oracle::random_rows(rng, n, p_dist(rng), trial % 2 ? 5 : 0);
        const double r = r_dist(rng);
        const auto got = extended_sample_entropy(MetricMatrix::from_rows(rows), m, r);
        const auto want = oracle::sampen_counts(rows, m, r);
        ASSERT_EQ(got.counts.a, want.a) << "trial " << trial;
        ASSERT_EQ(got.counts.b, want.b) << "trial " << trial;
    }
}

TEST(Composed, EuclideanNorm) {
    const std::vector<double> e{3, 4};
    EXPECT_EQ(composed_entropy(e), 5.0);
}

TEST(Composed, StrictlyIncreasingInEachScale) {
    std::vector<double> e{0.5, 1.0, 1.5, 2.0};
    const double base = composed_entropy(e);
    for (std::size_t i = 0; i < e.size(); ++i) {
        auto bumped = e;
        bumped[i] += 1e-6;
        EXPECT_GT(composed_entropy(bumped), base);
    }
}

TEST(EntropyConfig, ValidityRule) {
    EntropyConfig c;
    EXPECT_NO_THROW(c.validate());
    c.window.length = 999;
    EXPECT_THROW(c.validate(), ParameterError);
    c = {};
    c.r_factor = 0;
    EXPECT_THROW(c.validate(), ParameterError);
    c = {};
    c.m = 3;
    try {
        c.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.stage(), Stage::entropy);
    }
}

TEST(Mmse, ConstantMatrixIsZero) {
    const auto x = MetricMatrix::from_rows(std::vector<std::vector<double>>(1000, {5, 9, 1}));
    const auto prof = mmse(x, EntropyConfig{});
    EXPECT_EQ(prof.per_scale, std::vector<double>(10, 0.0));
    EXPECT_EQ(prof.composed, 0.0);
    EXPECT_FALSE(prof.flagged());
}

TEST(Mmse, WrongWindowLengthRejected) {
    const auto x = MetricMatrix::from_rows(std::vector<std::vector<double>>(999, {1, 2}));
    EXPECT_THROW(mmse(x, EntropyConfig{}), ParameterError);
}

TEST(Mmse, ScaleOneMatchesExtendedSampleEntropy) {
    std::mt19937_64 rng(31);
    const auto x = MetricMatrix::from_rows(oracle::random_rows(rng, 200, 3, 6));
    auto cfg = small_cfg(200, 2, 1);
    cfg.r_factor = 1.0;
    const auto prof = mmse(x, cfg);
    const auto xn = minmax_normalize(x);
    const double r = cfg.r_factor * total_variance(xn);
    EXPECT_EQ(prof.tolerance, r);
    EXPECT_EQ(prof.per_scale[0], extended_sample_entropy(xn, 1, r).value);
}

TEST(Mmse, ToleranceFixedAcrossScales) {
    // Scale 2 must use the window tolerance, not one recomputed from the
    // coarse-grained data.
    std::mt19937_64 rng(32);
    const auto x = MetricMatrix::from_rows(oracle::random_rows(rng, 200, 2, 6));
    auto cfg = small_cfg(200, 2, 1);
    cfg.r_factor = 1.0;
    const auto prof = mmse(x, cfg);
    const auto y = coarse_grain(minmax_normalize(x).values, 2);
    EXPECT_EQ(prof.per_scale[1], extended_sample_entropy(y, 1, prof.tolerance).value);
}

TEST(Mmse, UndefinedScalesCappedAndFlagged) {
    // A strictly increasing series never repeats a segment at a small tolerance.
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 100; ++i) rows.push_back({static_cast<double>(i)});
    auto cfg = small_cfg(100, 1, 1);
    cfg.r_factor = 1e-6;
    const auto prof = mmse(MetricMatrix::from_rows(rows), cfg);
    ASSERT_EQ(prof.undefined_scales, std::vector<std::size_t>{1});
    EXPECT_DOUBLE_EQ(prof.per_scale[0], std::log(99.0 * 98.0));
    EXPECT_DOUBLE_EQ(entropy_cap(100, 1), std::log(99.0 * 98.0));
}

TEST(Mmse, AmplitudeInvariance) {
    std::mt19937_64 rng(33);
    const auto rows = oracle::random_rows(rng, 1000, 3, 12);
    const auto x = MetricMatrix::from_rows(rows);
    auto x4 = x, x37 = x;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t r = 0; r < 1000; ++r) {
            x4(r, c) *= 4.0;
            x37(r, c) *= 3.7;
        }
    const auto a = mmse(x, EntropyConfig{});
    EXPECT_EQ(a.per_scale, mmse(x4, EntropyConfig{}).per_scale);
    const auto b = mmse(x37, EntropyConfig{});
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(a.per_scale[i], b.per_scale[i], 1e-9);
}

TEST(Mmse, WindowEndTimestamp) {
    auto x = MetricMatrix::from_rows(std::vector<std::vector<double>>(100, {1.0}));
    x.time = TimeAxis{1000, 60, true};
    EXPECT_EQ(mmse(x, small_cfg(100, 1, 1)).window_end, 1000 + 99 * 60);
}

TEST(Mmse, LateWindowMoreComplexThanEarly) {
    TraceSpec spec;
    spec.seed = 7;
    const auto trace = generate_trace(spec);
    const auto& x = trace.metrics;
    ASSERT_GE(x.rows(), 2000u);
    EntropyConfig cfg;
    const double early = mmse(x.slice_rows(0, 1000), cfg).composed;
    const double late = mmse(x.slice_rows(x.rows() - 1000, 1000), cfg).composed;
    EXPECT_GT(late, early);
}

TEST(MseProfile, ConstantSeriesAllZero) {
    const std::vector<double> x(1000, 2.0);
    const auto prof = mse_profile(x, EntropyConfig{});
    EXPECT_EQ(prof.per_scale, std::vector<double>(10, 0.0));
}

TEST(MseProfile, WhiteNoiseDecreasesWithScale) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> x(1000);
    for (auto& v : x) v = g(rng);
    const auto prof = mse_profile(x, EntropyConfig{});
    EXPECT_LT(spearman_with_time(prof.per_scale), 0.0);
}

TEST(MseProfile, AgreesWithMmseUnderVarianceTolerance) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> x(1000);
    for (auto& v : x) v = g(rng);
    const auto single = MetricMatrix::from_columns({x});
    EXPECT_EQ(mse_profile(x, EntropyConfig{}, ToleranceBasis::variance).per_scale,
              mmse(single, EntropyConfig{}).per_scale);
}

TEST(MseProfile, StdDevToleranceUsesSigma) {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> x(1000);
    for (auto& v : x) v = g(rng);
    const auto prof = mse_profile(x, EntropyConfig{});
    const auto xn = minmax_normalize(MetricMatrix::from_columns({x}));
    EXPECT_DOUBLE_EQ(prof.tolerance, 0.15 * std::sqrt(sample_variance(xn.values.column(0))));
}
