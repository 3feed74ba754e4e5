#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "big_int.hpp"

namespace partition_lab {

/// Smallest integer >= n / m for n >= 0, m >= 1.
constexpr std::int64_t ceil_div(std::int64_t n, std::int64_t m)
{
    return (n + m - 1) / m;
}

/// Residue parameter j = m + n - m * ceil(n / m); always 1 <= j <= m.
constexpr std::int64_t residue_j(std::int64_t n, std::int64_t m)
{
    return m + n - m * ceil_div(n, m);
}

/// Whether offset l lies in the range where the fixed-largest-part count
/// has the exact form |P_{m(l+1)-j}(m-1)|, i.e. l <= (n/m - m) / (m - 1).
constexpr bool in_exact_largest_part_range(std::int64_t n, std::int64_t m, std::int64_t l)
{
    return l >= 0 && l * m * (m - 1) <= n - m * m;
}

/// M_n = floor((n/m - m) / (m - 1)); negative when the exact range is empty.
constexpr std::int64_t exact_range_cutoff(std::int64_t n, std::int64_t m)
{
    std::int64_t const num = n - m * m;
    std::int64_t const den = m * (m - 1);
    return num >= 0 ? num / den : -((-num + den - 1) / den);
}

/// Hardy-Ramanujan constant K with log p(N) <= K sqrt(N) for all N >= 1.
inline constexpr double hardy_ramanujan_k = std::numbers::pi * 0.81649658092772603273;  // pi * sqrt(2/3)

inline double hr_log_upper_bound(std::int64_t big_n)
{
    if (big_n < 1)
        throw std::invalid_argument("hr_log_upper_bound: N must be >= 1");
    return hardy_ramanujan_k * std::sqrt(static_cast<double>(big_n));
}

/// log( C(n-1, m-1) / m! ), the Erdos-Lehner estimate of |P_n(m)| for m = o(n^{1/3}).
inline double erdos_lehner_log_estimate(std::int64_t n, std::int64_t m)
{
    if (m < 1 || m > n)
        throw std::invalid_argument("erdos_lehner_log_estimate: need 1 <= m <= n");
    auto const nd = static_cast<double>(n);
    auto const md = static_cast<double>(m);
    return std::lgamma(nd) - std::lgamma(md) - std::lgamma(nd - md + 1.0) - std::lgamma(md + 1.0);
}

namespace detail {

// log C(a, b) for real a >= b >= 0.
inline double log_binomial(double a, double b)
{
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

// Offset c in |P_N(k)| <= C(N + c, k - 1) / k!, from mapping partitions into
// exactly k parts onto compositions with k distinct parts.
inline double distinct_shift(std::int64_t k)
{
    auto const kd = static_cast<double>(k);
    return kd + kd * (kd - 1.0) / 2.0 - 1.0;
}

}  // namespace detail

/// Rigorous upper bound on log |P_N(k)| (N >= 0, k >= 1): the smaller of the
/// Hardy-Ramanujan bound and the composition bound C(N + c, k - 1) / k!.
inline double log_count_upper_bound(std::int64_t big_n, std::int64_t k)
{
    if (big_n < 0 || k < 1)
        throw std::invalid_argument("log_count_upper_bound: need N >= 0, k >= 1");
    if (big_n == 0)
        return 0.0;
    double const hr = hr_log_upper_bound(big_n);
    double const poly = detail::log_binomial(static_cast<double>(big_n) + detail::distinct_shift(k),
                                             static_cast<double>(k - 1))
                        - std::lgamma(static_cast<double>(k) + 1.0);
    return std::min(hr, poly);
}

/// Log of an upper bound on sum_{l > last} q^l |P_{m(l+1)-j}(m-1)|.
///
/// Both bounding families (Hardy-Ramanujan and composition) have term
/// ratios that decrease in l, so once a ratio drops below one the rest of
/// the series is dominated by a geometric series. Returns +inf when neither
/// family has reached a ratio below one at index last + 1.
inline double log_weighted_tail_bound(double q, std::int64_t m, std::int64_t j, std::int64_t last)
{
    if (!(q > 0.0 && q < 1.0) || m < 2 || j < 1 || j > m || last < -1)
        throw std::invalid_argument("log_weighted_tail_bound: invalid arguments");
    double const log_q = std::log(q);
    std::int64_t const l = last + 1;
    auto const s = static_cast<double>(m * (l + 1) - j);
    auto const md = static_cast<double>(m);
    auto const k = m - 1;
    double best = std::numeric_limits<double>::infinity();

    // Hardy-Ramanujan family: q^l exp(K sqrt(s_l)).
    {
        double const log_term = static_cast<double>(l) * log_q + hardy_ramanujan_k * std::sqrt(s);
        double const log_ratio = log_q + hardy_ramanujan_k * (std::sqrt(s + md) - std::sqrt(s));
        if (log_ratio < 0.0)
            best = std::min(best, log_term - std::log1p(-std::exp(log_ratio)));
    }
    // Composition family: q^l C(s_l + c, k - 1) / k!.
    {
        double const c = detail::distinct_shift(k);
        double const log_term = static_cast<double>(l) * log_q
                                + detail::log_binomial(s + c, static_cast<double>(k - 1))
                                - std::lgamma(static_cast<double>(k) + 1.0);
        double log_ratio = log_q;
        for (std::int64_t i = 0; i + 2 <= k; ++i) {
            auto const id = static_cast<double>(i);
            log_ratio += std::log(s + md + c - id) - std::log(s + c - id);
        }
        if (log_ratio < 0.0)
            best = std::min(best, log_term - std::log1p(-std::exp(log_ratio)));
    }
    return best;
}

/// Memoized exact counts of restricted partitions.
///
/// Columns hold |P_x(m)| for x = 0 .. size-1 and are grown lazily with the
/// part-size recurrence P(x, m) = P(x, m-1) + P(x-m, m). Bounded counts
/// (at most m parts, each at most b) are memoized by normalized key.
///
/// Single-writer until freeze(); afterwards every operation is const in
/// effect and misses are computed into scratch storage, so the cache can be
/// shared by concurrent readers.
class CountCache
{
  public:
    using Column = std::vector<BigInt>;

    /// |P_n(m)|; P_0(m) = 1 and P_n(0) = 0 for n >= 1.
    BigInt count_at_most(std::int64_t n, std::int64_t m) const
    {
        if (n < 0 || m < 0)
            throw std::invalid_argument("count_at_most: negative argument");
        m = std::min(m, n);
        if (auto const* col = find_column(m, n); col)
            return (*col)[static_cast<std::size_t>(n)];
        if (frozen_)
            return build_column(m, n)[static_cast<std::size_t>(n)];
        return grow_column(m, n)[static_cast<std::size_t>(n)];
    }

    /// Column |P_x(m)| for x = 0..max_total, grown if necessary.
    Column const& column(std::int64_t m, std::int64_t max_total) const
    {
        if (m < 0 || max_total < 0)
            throw std::invalid_argument("column: negative argument");
        if (auto const* col = find_column(m, max_total); col)
            return *col;
        if (frozen_)
            throw std::logic_error("CountCache: column requested after freeze");
        return grow_column(m, max_total);
    }

    /// Pre-grow columns 0..max_parts up to max_total, e.g. before freeze().
    void reserve_columns(std::int64_t max_parts, std::int64_t max_total)
    {
        for (std::int64_t m = 0; m <= max_parts; ++m)
            column(m, max_total);
    }

    /// #{partitions of n into at most m parts, each part <= b}.
    BigInt count_bounded(std::int64_t n, std::int64_t m, std::int64_t b) const
    {
        if (n < 0 || m < 0 || b < 0)
            throw std::invalid_argument("count_bounded: negative argument");
        if (frozen_) {
            BoundedMemo scratch;
            return bounded(n, m, b, scratch);
        }
        return bounded(n, m, b, bounded_);
    }

    /// #{partitions in P_n(m) whose largest part equals k1}.
    BigInt count_with_largest(std::int64_t n, std::int64_t m, std::int64_t k1) const
    {
        if (n < 1 || m < 1)
            throw std::invalid_argument("count_with_largest: need n >= 1, m >= 1");
        if (k1 < ceil_div(n, m) || k1 > n)
            throw std::invalid_argument("count_with_largest: k1 outside [ceil(n/m), n]");
        return count_bounded(n - k1, m - 1, k1);
    }

    void freeze() noexcept { frozen_ = true; }
    void thaw() noexcept { frozen_ = false; }
    bool frozen() const noexcept { return frozen_; }

    std::map<std::int64_t, Column> const& columns() const noexcept { return columns_; }

    /// Install a column loaded from storage; keeps the longer of the two.
    void adopt_column(std::int64_t m, Column values)
    {
        if (frozen_)
            throw std::logic_error("CountCache: adopt_column after freeze");
        auto& slot = columns_[m];
        if (values.size() > slot.size())
            slot = std::move(values);
    }

    std::size_t bounded_entries() const noexcept { return bounded_.size(); }

  private:
    struct Key
    {
        std::int64_t n, m, b;
        bool operator==(Key const&) const = default;
    };
    struct KeyHash
    {
        std::size_t operator()(Key const& k) const noexcept
        {
            std::uint64_t h = static_cast<std::uint64_t>(k.n) * 0x9E3779B97F4A7C15ULL;
            h ^= static_cast<std::uint64_t>(k.m) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
            h ^= static_cast<std::uint64_t>(k.b) + 0x94D049BB133111EBULL + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };
    using BoundedMemo = std::unordered_map<Key, BigInt, KeyHash>;

    Column const* find_column(std::int64_t m, std::int64_t n) const
    {
        auto it = columns_.find(m);
        if (it != columns_.end() && static_cast<std::int64_t>(it->second.size()) > n)
            return &it->second;
        return nullptr;
    }

    // Column m over 0..max_total, starting from the closest stored column
    // below m that is long enough.
    Column build_column(std::int64_t m, std::int64_t max_total) const
    {
        auto const len = static_cast<std::size_t>(max_total) + 1;
        Column work;
        std::int64_t start = 0;
        for (auto it = columns_.upper_bound(m); it != columns_.begin();) {
            --it;
            if (it->second.size() >= len) {
                work.assign(it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(len));
                start = it->first;
                break;
            }
        }
        if (work.empty()) {
            work.assign(len, BigInt(0));
            work[0] = 1;
        }
        for (std::int64_t part = start + 1; part <= m; ++part) {
            auto const p = static_cast<std::size_t>(part);
            for (std::size_t x = p; x < len; ++x)
                work[x] += work[x - p];
        }
        return work;
    }

    Column const& grow_column(std::int64_t m, std::int64_t max_total) const
    {
        std::int64_t target = max_total;
        if (auto it = columns_.find(m); it != columns_.end())
            target = std::max<std::int64_t>(target, static_cast<std::int64_t>(it->second.size()) * 3 / 2);
        auto& slot = columns_[m];
        slot = build_column(m, target);
        return slot;
    }

    BigInt bounded(std::int64_t n, std::int64_t m, std::int64_t b, BoundedMemo& memo) const
    {
        if (n == 0)
            return 1;
        if (m == 0 || b == 0)
            return 0;
        if (b > n)
            b = n;
        if (m > n)
            m = n;
        if (n > m * b)
            return 0;
        // Complement inside the m x b box, then conjugate so m <= b.
        if (m * b - n < n)
            n = m * b - n;
        if (n == 0)
            return 1;
        if (m > b)
            std::swap(m, b);
        if (n <= b)
            return count_at_most(n, m);

        Key const key{n, m, b};
        if (auto it = memo.find(key); it != memo.end())
            return it->second;

        // Split on the largest part h.
        BigInt total = 0;
        for (std::int64_t h = ceil_div(n, m); h <= b; ++h)
            total += bounded(n - h, m - 1, h, memo);
        memo.emplace(key, total);
        return total;
    }

    mutable std::map<std::int64_t, Column> columns_;
    mutable BoundedMemo bounded_;
    bool frozen_ = false;
};

}  // namespace partition_lab
