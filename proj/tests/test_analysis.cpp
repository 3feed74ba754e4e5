#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <partition_lab/analysis.hpp>
#include <partition_lab/counting.hpp>

using namespace partition_lab;

namespace {

// J(v) = pi^2/6 - sum_k e^{-kv} (v/k + 1/k^2), summed to machine precision.
double bose_series(double v)
{
    double s = std::numbers::pi * std::numbers::pi / 6.0;
    for (int k = 1; k < 100000; ++k) {
        double const term = std::exp(-k * v) * (v / k + 1.0 / (double(k) * k));
        s -= term;
        if (term < 1e-20)
            break;
    }
    return s;
}

}  // namespace

TEST(Analysis, BoseIntegralReferenceValues)
{
    EXPECT_NEAR(bose_integral(0.001), 0.0009997500277777775, 1e-12);
    EXPECT_NEAR(bose_integral(0.1), 0.097527775000472324626, 1e-12);
    EXPECT_NEAR(bose_integral(1.0), 0.77750463411224827642, 1e-12);
    EXPECT_NEAR(bose_integral(2.0), 1.2138945692196201441, 1e-12);
    EXPECT_NEAR(bose_integral(5.0), 1.6043809885007306052, 1e-12);
    EXPECT_NEAR(bose_integral(10.0), 1.6444346567994602563, 1e-12);
    EXPECT_NEAR(bose_integral(50.0), 1.6449340668482264365, 1e-12);
    EXPECT_NEAR(bose_integral(std::log(2.0)), 0.58224052646501251, 1e-12);
    EXPECT_EQ(bose_integral(0.0), 0.0);
    EXPECT_THROW(bose_integral(-1.0), std::invalid_argument);
}

TEST(Analysis, BoseIntegralMatchesSeries)
{
    for (double v = 0.05; v < 80.0; v *= 1.3)
        ASSERT_NEAR(bose_integral(v), bose_series(v), 1e-12) << v;
}

TEST(Analysis, SolveVReferenceValues)
{
    EXPECT_NEAR(solve_v(0.5), 0.23565688467944804, 1e-10);
    EXPECT_NEAR(solve_v(1.0), 0.8146511367476111, 1e-10);
    EXPECT_NEAR(solve_v(2.0), 2.273499194573972, 1e-10);
    EXPECT_NEAR(solve_v(4.0), 5.0702212968495602, 1e-10);
    EXPECT_THROW(solve_v(0.0), std::invalid_argument);
}

TEST(Analysis, SolveVResidualAndMonotone)
{
    double prev = 0.0;
    for (double u = 0.01; u <= 100.0; u *= 1.15) {
        double const v = solve_v(u);
        ASSERT_GT(v, 0.0);
        ASSERT_LE(std::abs(u * u * bose_integral(v) - v * v), 1e-10 * std::max(1.0, v * v)) << u;
        ASSERT_GT(v, prev) << u;
        prev = v;
    }
    // Large u: v ~ u pi / sqrt 6.
    EXPECT_NEAR(solve_v(100.0) / (100.0 * std::numbers::pi / std::sqrt(6.0)), 1.0, 1e-6);
}

TEST(Analysis, SzekeresFunctions)
{
    EXPECT_NEAR(szekeres_g(0.5), 1.7230745381918765, 1e-9);
    EXPECT_NEAR(szekeres_g(1.0), 2.2141221385158423, 1e-9);
    EXPECT_NEAR(szekeres_g(2.0), 2.4907894525985008, 1e-9);
    EXPECT_NEAR(szekeres_g(4.0), 2.5603140031178782, 1e-9);
    EXPECT_NEAR(szekeres_f(0.5), 0.15906653536181768, 1e-9);
    EXPECT_NEAR(szekeres_f(1.0), 0.15820872026725041, 1e-9);
    EXPECT_NEAR(szekeres_f(2.0), 0.15388100507811558, 1e-9);
    EXPECT_NEAR(szekeres_f(4.0), 0.14686146021945104, 1e-9);
    // g tends to pi sqrt(2/3) as u grows.
    EXPECT_NEAR(szekeres_g(50.0), hardy_ramanujan_k, 1e-6);
}

TEST(Analysis, SzekeresDerivativeMatchesFiniteDifference)
{
    for (double u = 0.2; u < 10.0; u *= 1.4) {
        double const h = 1e-5 * u;
        double const fd = (szekeres_g(u + h) - szekeres_g(u - h)) / (2.0 * h);
        ASSERT_NEAR(szekeres_g_prime(u), fd, 1e-6) << u;
    }
}

TEST(Analysis, SzekeresRadicandPositive)
{
    for (double u = 0.01; u < 60.0; u *= 1.2)
        ASSERT_GT(szekeres_f(u), 0.0) << u;
}

TEST(Analysis, SzekeresEstimateTracksExactCounts)
{
    CountCache cache;
    std::int64_t const n = 10000;
    for (std::int64_t k : {50, 100, 200, 400})
        EXPECT_NEAR(std::exp(szekeres_log_estimate(n, k) - log_of(cache.count_at_most(n, k))), 1.0, 0.02) << k;
}

TEST(Analysis, CltReferenceValuesHalf)
{
    CltParams const p = clt_params(0.5);
    EXPECT_NEAR(p.lambda, 0.69314718055994531, 1e-15);
    EXPECT_NEAR(p.t0, 0.90839397607921598, 1e-10);
    EXPECT_NEAR(p.gamma, 1.2118573712686517, 1e-10);
    EXPECT_NEAR(p.sigma2, 2.0539861986990749, 1e-10);
    EXPECT_NEAR(p.psi2_t0, -3.4659077305073995, 1e-9);
}

TEST(Analysis, CltReferenceTable)
{
    struct Row
    {
        double q, t0, gamma, sigma2, psi2;
    };
    for (Row r : {Row{0.1, 2.0197223409216765, 0.245141399536945, 0.16467217177617652, -0.35784072223035056},
                  Row{0.3, 1.2766550797628552, 0.61355407484486974, 0.66325146070503215, -1.3929653404563254},
                  Row{0.7, 0.62456486982538743, 2.5635683123908249, 7.8329115597428123, -8.6034264942243201},
                  Row{0.9, 0.32890203190099845, 9.244147937195597, 90.055518570218695, -35.087329963316742}}) {
        CltParams const p = clt_params(r.q);
        EXPECT_NEAR(p.t0 / r.t0, 1.0, 1e-10) << r.q;
        EXPECT_NEAR(p.gamma / r.gamma, 1.0, 1e-10) << r.q;
        EXPECT_NEAR(p.sigma2 / r.sigma2, 1.0, 1e-9) << r.q;
        EXPECT_NEAR(p.psi2_t0 / r.psi2, 1.0, 1e-9) << r.q;
        EXPECT_NEAR(sigma2_from_curvature(p) / p.sigma2, 1.0, 1e-9) << r.q;
        EXPECT_NEAR(p.t0 * p.t0 * p.gamma, 1.0, 1e-12) << r.q;
    }
}

TEST(Analysis, PsiUnimodalAtT0)
{
    for (double q : {0.1, 0.5, 0.9}) {
        CltParams const p = clt_params(q);
        EXPECT_NEAR(psi_prime(p.t0, p.lambda), 0.0, 1e-9) << q;
        double const h = 1e-4 * p.t0;
        double const fd = (psi(p.t0 + h, p.lambda) - 2.0 * psi(p.t0, p.lambda) + psi(p.t0 - h, p.lambda)) / (h * h);
        EXPECT_NEAR(fd / p.psi2_t0, 1.0, 1e-4) << q;
        EXPECT_NEAR(psi_second(p.t0, p.lambda) / p.psi2_t0, 1.0, 1e-8) << q;
        // Increasing before t0, decreasing after.
        for (double t = 0.2 * p.t0; t < 5.0 * p.t0; t *= 1.1) {
            if (std::abs(t - p.t0) < 0.02 * p.t0)
                continue;
            ASSERT_EQ(psi_prime(t, p.lambda) > 0.0, t < p.t0) << q << "," << t;
        }
        for (double t = 0.3 * p.t0; t < 4.0 * p.t0; t *= 1.07)
            ASSERT_LE(psi(t, p.lambda), psi(p.t0, p.lambda) + 1e-12);
    }
}

TEST(Analysis, PsiFirstDerivativeMatchesFiniteDifference)
{
    double const lambda = std::log(2.0);
    for (double t = 0.3; t < 3.0; t *= 1.3) {
        double const h = 1e-6 * t;
        double const fd = (psi(t + h, lambda) - psi(t - h, lambda)) / (2.0 * h);
        ASSERT_NEAR(psi_prime(t, lambda), fd, 1e-6) << t;
    }
}
