#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include <partition_lab/counting.hpp>

using namespace partition_lab;

namespace {

// Brute force: count partitions of n into at most m parts, each <= b.
std::int64_t brute(std::int64_t n, std::int64_t m, std::int64_t b)
{
    if (n == 0)
        return 1;
    if (m == 0 || b == 0)
        return 0;
    std::int64_t c = 0;
    for (std::int64_t h = std::min(n, b); h >= 1; --h)
        c += brute(n - h, m - 1, h);
    return c;
}

// Plain 64-bit table over (total, max part) with no normalization tricks.
std::vector<std::vector<std::int64_t>> table_at_most(std::int64_t max_n, std::int64_t max_m)
{
    std::vector<std::vector<std::int64_t>> t(static_cast<std::size_t>(max_m) + 1,
                                             std::vector<std::int64_t>(static_cast<std::size_t>(max_n) + 1, 0));
    for (std::int64_t m = 0; m <= max_m; ++m)
        t[m][0] = 1;
    for (std::int64_t m = 1; m <= max_m; ++m)
        for (std::int64_t x = 1; x <= max_n; ++x)
            t[m][x] = t[m - 1][x] + (x >= m ? t[m][x - m] : 0);
    return t;
}

// Partitions of n into exactly k distinct parts, by 0/1 inclusion of each part size.
std::int64_t strict_exact(std::int64_t n, std::int64_t k)
{
    std::vector<std::vector<std::int64_t>> d(static_cast<std::size_t>(k) + 1,
                                             std::vector<std::int64_t>(static_cast<std::size_t>(n) + 1, 0));
    d[0][0] = 1;
    for (std::int64_t part = 1; part <= n; ++part)
        for (std::int64_t c = k; c >= 1; --c)
            for (std::int64_t x = n; x >= part; --x)
                d[c][x] += d[c - 1][x - part];
    return d[k][n];
}

std::int64_t as_i64(BigInt const& v) { return static_cast<std::int64_t>(v.get_si()); }

}  // namespace

TEST(Counting, KnownValues)
{
    CountCache cache;
    EXPECT_EQ(as_i64(cache.count_at_most(10, 3)), 14);
    EXPECT_EQ(cache.count_at_most(100, 100), BigInt(190569292));
    EXPECT_EQ(as_i64(cache.count_at_most(0, 0)), 1);
    EXPECT_EQ(as_i64(cache.count_at_most(5, 0)), 0);
    EXPECT_EQ(as_i64(cache.count_with_largest(10, 3, 4)), 2);
    EXPECT_EQ(cache.count_at_most(1000, 1000).get_str(), "24061467864032622473692149727991");
}

TEST(Counting, MatchesBruteForceSmall)
{
    CountCache cache;
    for (std::int64_t n = 0; n <= 40; ++n)
        for (std::int64_t m = 0; m <= 12; ++m) {
            ASSERT_EQ(as_i64(cache.count_at_most(n, m)), brute(n, m, n)) << n << "," << m;
            for (std::int64_t b = 0; b <= 12; ++b)
                ASSERT_EQ(as_i64(cache.count_bounded(n, m, b)), brute(n, m, b)) << n << "," << m << "," << b;
        }
}

TEST(Counting, MatchesIndependentTable)
{
    auto const t = table_at_most(400, 30);
    CountCache cache;
    for (std::int64_t m = 0; m <= 30; ++m)
        for (std::int64_t n = 0; n <= 400; n += 7)
            ASSERT_EQ(as_i64(cache.count_at_most(n, m)), t[m][n]) << n << "," << m;
}

TEST(Counting, PartSizeRecurrenceAndMonotonicity)
{
    CountCache cache;
    for (std::int64_t m = 1; m <= 20; ++m)
        for (std::int64_t n = 1; n <= 300; ++n) {
            BigInt rhs = cache.count_at_most(n, m - 1);
            if (n >= m)
                rhs += cache.count_at_most(n - m, m);
            ASSERT_EQ(cache.count_at_most(n, m), rhs);
            ASSERT_GE(cache.count_at_most(n, m), cache.count_at_most(n, m - 1));
        }
}

TEST(Counting, DistinctPartsBijection)
{
    CountCache cache;
    for (std::int64_t m = 1; m <= 10; ++m)
        for (std::int64_t n = m * (m + 1) / 2; n <= 200; n += 3)
            ASSERT_EQ(as_i64(cache.count_at_most(n - m * (m + 1) / 2, m)), strict_exact(n, m)) << n << "," << m;
}

TEST(Counting, BoundedSymmetries)
{
    CountCache cache;
    for (std::int64_t m = 0; m <= 9; ++m)
        for (std::int64_t b = 0; b <= 9; ++b)
            for (std::int64_t n = 0; n <= m * b; ++n) {
                ASSERT_EQ(cache.count_bounded(n, m, b), cache.count_bounded(n, b, m));
                ASSERT_EQ(cache.count_bounded(n, m, b), cache.count_bounded(m * b - n, m, b));
            }
    EXPECT_EQ(as_i64(cache.count_bounded(50, 3, 10)), 0);
}

TEST(Counting, LargestPartSumsToTotal)
{
    CountCache cache;
    for (std::int64_t m = 1; m <= 8; ++m)
        for (std::int64_t n = m; n <= 120; ++n) {
            BigInt sum = 0;
            for (std::int64_t k = ceil_div(n, m); k <= n; ++k)
                sum += cache.count_with_largest(n, m, k);
            ASSERT_EQ(sum, cache.count_at_most(n, m)) << n << "," << m;
        }
    EXPECT_THROW(cache.count_with_largest(10, 3, 3), std::invalid_argument);
}

TEST(Counting, FixedLargestPartIdentityAndBound)
{
    CountCache cache;
    for (std::int64_t m = 2; m <= 10; ++m)
        for (std::int64_t n = m; n <= 300; ++n) {
            std::int64_t const j = residue_j(n, m);
            ASSERT_GE(j, 1);
            ASSERT_LE(j, m);
            ASSERT_EQ((n - j) % m, 0);
            std::int64_t const base = ceil_div(n, m);
            for (std::int64_t l = 0; base + l <= n; ++l) {
                BigInt const lhs = cache.count_with_largest(n, m, base + l);
                BigInt const rhs = cache.count_at_most(m * (l + 1) - j, m - 1);
                if (in_exact_largest_part_range(n, m, l))
                    ASSERT_EQ(lhs, rhs) << n << "," << m << "," << l;
                else
                    ASSERT_LE(lhs, rhs) << n << "," << m << "," << l;
            }
        }
}

TEST(Counting, ExactRangeCutoff)
{
    EXPECT_EQ(exact_range_cutoff(300, 12), 1);
    EXPECT_EQ(exact_range_cutoff(1000000, 50), 407);
    EXPECT_LT(exact_range_cutoff(5, 3), 0);
    for (std::int64_t m = 2; m <= 10; ++m)
        for (std::int64_t n = m; n <= 500; ++n) {
            std::int64_t const c = exact_range_cutoff(n, m);
            EXPECT_EQ(in_exact_largest_part_range(n, m, c), c >= 0);
            EXPECT_FALSE(in_exact_largest_part_range(n, m, c + 1));
        }
}

TEST(Counting, HardyRamanujanBound)
{
    CountCache cache;
    for (std::int64_t n : {1, 2, 10, 100, 400, 1000})
        EXPECT_LE(log_of(cache.count_at_most(n, n)), hr_log_upper_bound(n));
    EXPECT_NEAR(hardy_ramanujan_k, 2.5650996603237281, 1e-15);
}

TEST(Counting, CountUpperBoundHolds)
{
    CountCache cache;
    for (std::int64_t k = 1; k <= 12; ++k)
        for (std::int64_t n = 0; n <= 600; n += 13)
            ASSERT_LE(log_of(cache.count_at_most(n, k)), log_count_upper_bound(n, k) + 1e-12) << n << "," << k;
}

TEST(Counting, WeightedTailBoundDominatesTail)
{
    CountCache cache;
    for (double q : {0.1, 0.5, 0.9})
        for (std::int64_t m : {2, 3, 5})
            for (std::int64_t j = 1; j <= m; ++j) {
                // Brute tail out to where terms are negligible.
                std::int64_t const far = q > 0.8 ? 1500 : 400;
                std::vector<double> lw;
                for (std::int64_t l = 0; l <= far; ++l)
                    lw.push_back(static_cast<double>(l) * std::log(q) + log_of(cache.count_at_most(m * (l + 1) - j, m - 1)));
                for (std::int64_t last = 0; last < 40; last += 3) {
                    double mx = -INFINITY;
                    for (std::size_t l = static_cast<std::size_t>(last) + 1; l < lw.size(); ++l)
                        mx = std::max(mx, lw[l]);
                    double s = 0.0;
                    for (std::size_t l = static_cast<std::size_t>(last) + 1; l < lw.size(); ++l)
                        s += std::exp(lw[l] - mx);
                    ASSERT_GE(log_weighted_tail_bound(q, m, j, last), mx + std::log(s) - 1e-9)
                        << q << "," << m << "," << j << "," << last;
                }
            }
}

TEST(Counting, ErdosLehnerIsFinite)
{
    EXPECT_TRUE(std::isfinite(erdos_lehner_log_estimate(1000, 10)));
    EXPECT_THROW(erdos_lehner_log_estimate(5, 6), std::invalid_argument);
}

TEST(Counting, FrozenCacheAnswersWithoutGrowing)
{
    CountCache cache;
    cache.reserve_columns(4, 100);
    cache.freeze();
    EXPECT_EQ(as_i64(cache.count_at_most(50, 4)), table_at_most(50, 4)[4][50]);
    EXPECT_EQ(as_i64(cache.count_at_most(200, 3)), table_at_most(200, 3)[3][200]);
    EXPECT_THROW(cache.column(3, 500), std::logic_error);
    EXPECT_EQ(cache.columns().at(3).size(), 101u);
    cache.thaw();
    EXPECT_EQ(cache.column(3, 500).size(), 501u);
}
