#include <gtest/gtest.h>

#include <cmath>

#include <partition_lab/limits.hpp>
#include <partition_lab/samplers.hpp>
#include <partition_lab/statistics.hpp>

using namespace partition_lab;

TEST(LimitLaw, ThreePartExampleByHand)
{
    // m = 3, j = 1: weights 2^-l (floor((3l + 2) / 2) + 1).
    double z = 0.0;
    std::vector<double> w;
    for (int l = 0; l < 200; ++l) {
        w.push_back(std::ldexp((3 * l + 2) / 2 + 1, -l));
        z += w.back();
    }
    CountCache cache;
    DiscretePmf const pmf = limit_pmf_k1(cache, {3, 1, 0.5, 1e-14});
    EXPECT_NEAR(pmf.at(0), 0.3, 1e-14);
    for (std::size_t l = 0; l < pmf.probs.size(); ++l)
        ASSERT_NEAR(pmf.probs[l], w[l] / z, 1e-14);
    EXPECT_LE(pmf.tail_bound, 1e-14);
}

TEST(LimitLaw, ToleranceIsHonest)
{
    CountCache cache;
    for (double q : {0.1, 0.5, 0.9})
        for (std::int64_t m : {2, 3, 6})
            for (std::int64_t j : {std::int64_t{1}, m}) {
                for (double tol : {1e-4, 1e-8}) {
                    DiscretePmf const coarse = limit_pmf_k1(cache, {m, j, q, tol});
                    DiscretePmf const fine = limit_pmf_k1(cache, {m, j, q, tol / 10.0});
                    EXPECT_LE(coarse.tail_bound, tol);
                    for (std::size_t l = 0; l < fine.probs.size(); ++l)
                        ASSERT_NEAR(coarse.at(static_cast<std::int64_t>(l)), fine.probs[l], tol)
                            << q << "," << m << "," << j << "," << l;
                }
            }
}

TEST(LimitLaw, JointMarginalizesToLargestPartLaw)
{
    CountCache cache;
    for (std::int64_t m : {2, 3, 4})
        for (std::int64_t j = 1; j <= m; ++j) {
            LimitLawSpec const spec{m, j, 0.5, 1e-13};
            LimitNormalizer const z = limit_normalizer(cache, spec);
            DiscretePmf const pmf = limit_pmf_k1(cache, spec);
            for (std::int64_t l = 0; l < 15; ++l) {
                double s = 0.0;
                std::size_t points = 0;
                for_each_joint_point(spec, l, [&](std::span<std::int64_t const> v) {
                    ASSERT_TRUE(in_joint_support(spec, v));
                    s += limit_joint_prob(z, spec, v);
                    ++points;
                });
                EXPECT_EQ(points, cache.count_at_most(m * (l + 1) - j, m - 1).get_ui());
                ASSERT_NEAR(s, pmf.at(l), 1e-10) << m << "," << j << "," << l;
            }
        }
}

TEST(LimitLaw, JointSupport)
{
    LimitLawSpec const spec{3, 1, 0.5, 1e-12};
    std::vector<std::int64_t> ok{1, 0, -3};
    std::vector<std::int64_t> wrong_sum{1, 0, -2};
    std::vector<std::int64_t> increasing{0, 1, -3};
    std::vector<std::int64_t> negative_top{-1, -1, 0};
    EXPECT_TRUE(in_joint_support(spec, ok));
    EXPECT_FALSE(in_joint_support(spec, wrong_sum));
    EXPECT_FALSE(in_joint_support(spec, increasing));
    EXPECT_FALSE(in_joint_support(spec, negative_top));
    CountCache cache;
    EXPECT_EQ(limit_joint_prob(cache, spec, wrong_sum), 0.0);
    EXPECT_NEAR(limit_joint_prob(cache, spec, ok), 0.5 * 0.3 / 2.0, 1e-12);
}

TEST(LimitLaw, FiniteLawApproachesLimit)
{
    // Doubles cannot resolve the tiny distances at n = 301 and 3001, so the
    // trend is checked in 512-bit floats from exact counts.
    mpf_set_default_prec(512);
    CountCache cache;
    auto weight = [](std::int64_t l, BigInt const& count) {
        mpf_class w(count);
        mpf_div_2exp(w.get_mpf_t(), w.get_mpf_t(), static_cast<mp_bitcnt_t>(l));
        return w;
    };
    std::int64_t const far = 3000;
    std::vector<mpf_class> limit;
    mpf_class z = 0;
    for (std::int64_t l = 0; l <= far; ++l) {
        limit.push_back(weight(l, cache.count_at_most(3 * l + 2, 2)));
        z += limit.back();
    }
    mpf_class prev = 1;
    for (std::int64_t n : {31, 301, 3001}) {
        ASSERT_EQ(residue_j(n, 3), 1);
        std::int64_t const base = ceil_div(n, 3);
        std::vector<mpf_class> finite;
        mpf_class zn = 0;
        for (std::int64_t l = 0; base + l <= n; ++l) {
            finite.push_back(weight(l, cache.count_with_largest(n, 3, base + l)));
            zn += finite.back();
        }
        mpf_class tv = 0;
        for (std::size_t l = 0; l < limit.size(); ++l) {
            mpf_class const a = l < finite.size() ? mpf_class(finite[l] / zn) : mpf_class(0);
            tv += abs(a - limit[l] / z);
        }
        tv /= 2;
        EXPECT_LT(tv, prev) << n;
        prev = tv;
    }
    EXPECT_LE(prev, 0.01);
    // The double-precision pipeline agrees at n = 3001.
    LimitLawSpec const spec{3, 1, 0.5, 1e-14};
    EXPECT_LE(tv_distance(geometric_offset_pmf(cache, {3001, 3, 0.5}), limit_pmf_k1(cache, spec)), 1e-12);
}

TEST(LimitLaw, ValidatesSpec)
{
    CountCache cache;
    EXPECT_THROW(limit_pmf_k1(cache, {1, 1, 0.5, 1e-12}), std::invalid_argument);
    EXPECT_THROW(limit_pmf_k1(cache, {3, 0, 0.5, 1e-12}), std::invalid_argument);
    EXPECT_THROW(limit_pmf_k1(cache, {3, 4, 0.5, 1e-12}), std::invalid_argument);
    EXPECT_THROW(limit_pmf_k1(cache, {3, 1, 1.0, 1e-12}), std::invalid_argument);
    EXPECT_THROW(limit_pmf_k1(cache, {3, 1, 0.5, 0.0}), std::invalid_argument);
}

TEST(Clt, NormalCdf)
{
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
    EXPECT_NEAR(normal_cdf(-3.0), 0.0013498980316300946, 1e-17);
    CltParams const p = clt_params(0.5);
    EXPECT_NEAR(clt_cdf(p.sigma(), p), 0.8413447460685429, 1e-14);
    EXPECT_DOUBLE_EQ(clt_cdf(0.0, 0.3), 0.5);
}

TEST(DirichletDensity, NormalizingConstant)
{
    EXPECT_NEAR(dirichlet_order_density(SimplexPoint::checked({0.5, 0.3, 0.2}), 1.0), 12.0, 1e-12);
    EXPECT_NEAR(dirichlet_order_density(SimplexPoint::checked({0.7, 0.3}), 1.0), 2.0, 1e-14);
    // Riemann sum over the ordered simplex in (y1, y2) coordinates.
    for (double alpha : {1.0, 2.0, 3.0}) {
        int const steps = 1500;
        double const h = 1.0 / steps;
        double s = 0.0;
        for (int a = 0; a < steps; ++a)
            for (int b = 0; b < steps; ++b) {
                double const y1 = (a + 0.5) * h;
                double const y2 = (b + 0.5) * h;
                double const y3 = 1.0 - y1 - y2;
                if (y3 < 0.0 || y1 < y2 || y2 < y3)
                    continue;
                s += dirichlet_order_density(SimplexPoint{{y1, y2, y3}}, alpha) * h * h;
            }
        EXPECT_NEAR(s, 1.0, 5e-3) << alpha;
    }
}

TEST(DirichletDensity, RejectsPointsOffTheSimplex)
{
    EXPECT_THROW(dirichlet_order_density(SimplexPoint{{0.2, 0.3, 0.5}}, 2.0), std::invalid_argument);
    EXPECT_THROW(dirichlet_order_density(SimplexPoint{{0.6, 0.3, 0.2}}, 2.0), std::invalid_argument);
    EXPECT_THROW(dirichlet_order_density(SimplexPoint::checked({0.5, 0.5}), 0.0), std::invalid_argument);
}

TEST(PowerTransform, Examples)
{
    auto const x = power_transform_check(SimplexPoint::checked({0.75, 0.25}), 2.0);
    EXPECT_DOUBLE_EQ(x[0], 0.5625);
    EXPECT_DOUBLE_EQ(x[1], 0.0625);
    auto const same = power_transform_check(SimplexPoint::checked({0.6, 0.4}), 1.0);
    EXPECT_DOUBLE_EQ(same[0], 0.6);
}

TEST(PowerTransform, LandsOnTheSphere)
{
    Rng rng = make_stream(6, 0);
    for (double alpha : {0.5, 1.0, 3.0, 7.0})
        for (int i = 0; i < 1000; ++i) {
            SimplexPoint const y = sample_dirichlet_order_stats(4, 2.0, rng);
            auto const x = power_transform_check(y, alpha);
            ASSERT_LE(power_sphere_residual(x, alpha), 1e-12);
            for (std::size_t k = 1; k < x.size(); ++k)
                ASSERT_GE(x[k - 1], x[k]);
        }
}
