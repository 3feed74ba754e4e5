#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include <partition_lab/statistics.hpp>

using namespace partition_lab;

TEST(Statistics, TotalVariation)
{
    DiscretePmf const a{0, {0.5, 0.5}, 0.0};
    DiscretePmf const b{1, {0.5, 0.5}, 0.0};
    EXPECT_DOUBLE_EQ(tv_distance(a, a), 0.0);
    EXPECT_DOUBLE_EQ(tv_distance(a, b), 0.5);
    DiscretePmf const far{10, {1.0}, 0.0};
    EXPECT_DOUBLE_EQ(tv_distance(a, far), 1.0);

    std::map<std::string, double> const p{{"x", 0.2}, {"y", 0.8}};
    std::map<std::string, double> const r{{"y", 0.5}, {"z", 0.5}};
    EXPECT_DOUBLE_EQ(tv_distance(p, r), 0.5);
}

TEST(Statistics, OneSampleKs)
{
    auto const uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
    EXPECT_DOUBLE_EQ(ks_statistic({0.5}, uniform), 0.5);
    EXPECT_DOUBLE_EQ(ks_statistic({0.25, 0.75}, uniform), 0.25);
    EXPECT_DOUBLE_EQ(ks_statistic({0.9, 0.95}, uniform), 0.9);
    EXPECT_THROW(ks_statistic({}, uniform), std::invalid_argument);
}

TEST(Statistics, TwoSampleKs)
{
    EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
    EXPECT_DOUBLE_EQ(ks_two_sample({1, 2}, {3, 4}), 1.0);
    // Ties across samples are stepped together.
    EXPECT_DOUBLE_EQ(ks_two_sample({1, 1, 2, 2}, {1, 2}), 0.0);
    EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3, 4}, {2, 4}), 0.25);
}

TEST(Statistics, ChiSquare)
{
    EXPECT_NEAR(chi_square_sf(3.841458820694124, 1.0), 0.05, 1e-12);
    EXPECT_NEAR(chi_square_sf(18.307038053275146, 10.0), 0.05, 1e-12);
    std::vector<std::uint64_t> const obs{10, 20, 30};
    std::vector<double> const probs{1.0, 2.0, 3.0};
    ChiSquareResult const perfect = chi_square_gof(obs, probs);
    EXPECT_NEAR(perfect.statistic, 0.0, 1e-12);
    EXPECT_EQ(perfect.dof, 2);
    EXPECT_NEAR(perfect.p_value, 1.0, 1e-12);
    std::vector<std::uint64_t> const skew{30, 20, 10};
    ChiSquareResult const bad = chi_square_gof(skew, probs);
    EXPECT_NEAR(bad.statistic, 160.0 / 3.0, 1e-12);
    EXPECT_LT(bad.p_value, 1e-8);
    std::vector<double> const zero{1.0, 0.0, 1.0};
    EXPECT_THROW(chi_square_gof(obs, zero), std::invalid_argument);
}
