#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "big_int.hpp"
#include "counting.hpp"
#include "discrete_pmf.hpp"
#include "errors.hpp"
#include "partition.hpp"
#include "random.hpp"

namespace partition_lab {

/// P(kappa) proportional to q^{k1} on P_n(m).
struct GeometricMeasureSpec
{
    std::int64_t n = 0;
    std::int64_t m = 0;
    double q = 0.5;

    void validate() const
    {
        if (n < 1 || m < 2 || m > n)
            throw std::invalid_argument("GeometricMeasureSpec: need 2 <= m <= n");
        if (!(q > 0.0 && q < 1.0))
            throw std::invalid_argument("GeometricMeasureSpec: q must lie in (0, 1)");
    }
};

/// A point of the closed ordered simplex: nonincreasing, nonnegative, summing to 1.
struct SimplexPoint
{
    std::vector<double> coords;

    static SimplexPoint checked(std::vector<double> coords, double tol = 1e-12)
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            if (!(coords[i] >= 0.0) || coords[i] > 1.0)
                throw std::invalid_argument("SimplexPoint: coordinates must lie in [0, 1]");
            if (i + 1 < coords.size() && coords[i] < coords[i + 1])
                throw std::invalid_argument("SimplexPoint: coordinates must be nonincreasing");
            sum += coords[i];
        }
        if (coords.empty() || std::abs(sum - 1.0) > tol)
            throw std::invalid_argument("SimplexPoint: coordinates must sum to 1");
        return SimplexPoint{std::move(coords)};
    }

    std::size_t size() const noexcept { return coords.size(); }
};

/// Exact pmf of the offset l = k1 - ceil(n/m) under the geometric measure.
///
/// Weights q^l * #{kappa in P_n(m) : k1 = ceil(n/m) + l} are exact counts
/// combined in the log domain. Terms are added until the certified bound on
/// the remaining weight, relative to the accumulated weight, drops to
/// rel_tol, or until max_offset (if >= 0) is reached.
inline DiscretePmf geometric_offset_pmf(CountCache const& cache, GeometricMeasureSpec const& spec,
                                        double rel_tol = 0x1p-64, std::int64_t max_offset = -1)
{
    spec.validate();
    std::int64_t const base = ceil_div(spec.n, spec.m);
    std::int64_t const j = residue_j(spec.n, spec.m);
    std::int64_t const full = spec.n - base;
    std::int64_t const stop = max_offset >= 0 ? std::min(full, max_offset) : full;
    double const log_q = std::log(spec.q);
    double const log_rel_tol = std::log(rel_tol);

    std::vector<double> log_w;
    double log_sum = -std::numeric_limits<double>::infinity();
    double log_tail = -std::numeric_limits<double>::infinity();
    for (std::int64_t l = 0; l <= stop; ++l) {
        double const lw = static_cast<double>(l) * log_q + log_of(cache.count_with_largest(spec.n, spec.m, base + l));
        log_w.push_back(lw);
        double const hi = std::max(log_sum, lw);
        log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(lw - hi));
        if (l == full) {
            log_tail = -std::numeric_limits<double>::infinity();
            break;
        }
        log_tail = log_weighted_tail_bound(spec.q, spec.m, j, l);
        if (log_tail - log_sum <= log_rel_tol)
            break;
    }

    DiscretePmf pmf;
    pmf.base_offset = 0;
    pmf.probs.reserve(log_w.size());
    for (double lw : log_w)
        pmf.probs.push_back(std::exp(lw - log_sum));
    pmf.tail_bound = std::exp(log_tail - log_sum);
    return pmf;
}

namespace detail {

// Uniform partition of `total` into at most `parts` parts (no cap), indexed
// by rank in [0, |P_total(parts)|). The smallest of the i remaining slots is
// chosen first: P(c) is proportional to P(R - i c, i - 1), and the
// cumulative weight of {c' < c} is P(R, i) - P(R - i c, i), so a binary
// search over column i finds c.
inline std::vector<std::int64_t> unrank_uncapped(CountCache const& cache, std::int64_t total,
                                                 std::int64_t parts, BigInt rank)
{
    std::vector<std::int64_t> increments(static_cast<std::size_t>(parts) + 1, 0);
    std::int64_t rest = total;
    BigInt target;
    for (std::int64_t i = parts; i >= 1 && rest > 0; --i) {
        auto const& col = cache.column(i, rest);
        // target in (0, P(rest, i)]
        target = col[static_cast<std::size_t>(rest)] - rank;
        std::int64_t lo = 0;
        std::int64_t hi = rest / i;
        while (lo < hi) {
            std::int64_t const mid = lo + (hi - lo + 1) / 2;
            if (col[static_cast<std::size_t>(rest - i * mid)] >= target)
                lo = mid;
            else
                hi = mid - 1;
        }
        rank = col[static_cast<std::size_t>(rest - i * lo)] - target;
        rest -= i * lo;
        increments[static_cast<std::size_t>(i)] = lo;
    }
    std::vector<std::int64_t> out;
    std::int64_t acc = 0;
    for (std::int64_t s = parts; s >= 1; --s) {
        acc += increments[static_cast<std::size_t>(s)];
        if (acc > 0)
            out.push_back(acc);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Uniform draw from partitions of total into at most `parts` parts, each <= cap.
///
/// While the cap binds, the largest remaining part h is chosen with
/// probability count_bounded(rest - h, parts - 1, h) / count_bounded(rest,
/// parts, cap); once it no longer binds, the remaining rank is decoded by
/// the uncapped smallest-part-first recursion. One uniform big integer
/// drives the whole draw, so the result is exactly uniform.
template <class Urbg>
Partition sample_uniform_bounded(CountCache const& cache, std::int64_t total, std::int64_t parts,
                                 std::int64_t cap, Urbg& rng)
{
    if (total < 0 || parts < 0 || cap < 0)
        throw std::invalid_argument("sample_uniform_bounded: negative argument");
    if (total == 0)
        return Partition({}, parts);
    BigInt const count = cache.count_bounded(total, parts, cap);
    if (sgn(count) == 0)
        throw std::invalid_argument("sample_uniform_bounded: no partition of " + std::to_string(total) + " into at most "
                                    + std::to_string(parts) + " parts of size <= " + std::to_string(cap));
    BigInt rank = uniform_below(rng, count);

    std::vector<std::int64_t> out;
    std::int64_t rest = total;
    std::int64_t slots = parts;
    std::int64_t bound = std::min(cap, total);
    while (rest > 0) {
        if (bound >= rest) {
            auto tail = detail::unrank_uncapped(cache, rest, slots, std::move(rank));
            out.insert(out.end(), tail.begin(), tail.end());
            break;
        }
        std::int64_t chosen = -1;
        for (std::int64_t h = bound; h >= ceil_div(rest, slots); --h) {
            BigInt const c = cache.count_bounded(rest - h, slots - 1, h);
            if (rank < c) {
                chosen = h;
                break;
            }
            rank -= c;
        }
        if (chosen < 0)
            throw std::logic_error("sample_uniform_bounded: rank outside counted set");
        out.push_back(chosen);
        rest -= chosen;
        --slots;
        bound = chosen;
    }
    return Partition(std::move(out), parts);
}

/// Exact sampler for the geometric measure.
///
/// The largest part is drawn from its exact marginal; given k1 the measure is
/// constant, so the remaining parts are a uniform partition of n - k1 into at
/// most m - 1 parts bounded by k1.
class GeometricSampler
{
  public:
    /// Table budget for full-partition sampling, in cells n * m.
    static constexpr std::int64_t table_budget = 100'000'000;

    GeometricSampler(CountCache const& cache, GeometricMeasureSpec spec, std::int64_t max_offset = -1,
                     double rel_tol = 0x1p-64)
        : cache_(&cache)
        , spec_(spec)
        , base_(ceil_div(spec.n, spec.m))
        , pmf_(geometric_offset_pmf(cache, spec, rel_tol, max_offset))
        , table_(pmf_.probs)
    {}

    GeometricMeasureSpec const& spec() const noexcept { return spec_; }
    DiscretePmf const& offset_pmf() const noexcept { return pmf_; }
    std::int64_t base() const noexcept { return base_; }

    template <class Urbg>
    std::int64_t sample_k1(Urbg& rng) const
    {
        return base_ + static_cast<std::int64_t>(table_.sample(rng));
    }

    /// Grow the count columns full-partition draws touch; call before
    /// freezing the cache for concurrent use.
    void prepare_partitions(CountCache& cache) const
    {
        check_budget();
        cache.reserve_columns(spec_.m, spec_.n);
    }

    template <class Urbg>
    Partition sample_partition(Urbg& rng) const
    {
        check_budget();
        std::int64_t const k1 = sample_k1(rng);
        Partition const rest = sample_uniform_bounded(*cache_, spec_.n - k1, spec_.m - 1, k1, rng);
        std::vector<std::int64_t> parts;
        parts.reserve(rest.length() + 1);
        parts.push_back(k1);
        parts.insert(parts.end(), rest.parts().begin(), rest.parts().end());
        return Partition(std::move(parts), spec_.m);
    }

  private:
    void check_budget() const
    {
        if (spec_.n > table_budget / spec_.m)
            throw RefusalError("geometric partition sampling needs a count table of n*m = "
                               + std::to_string(spec_.n) + "*" + std::to_string(spec_.m)
                               + " cells, above the budget of " + std::to_string(table_budget));
    }

    CountCache const* cache_;
    GeometricMeasureSpec spec_;
    std::int64_t base_;
    DiscretePmf pmf_;
    CumulativeTable table_;
};

/// One exact draw of k1 under the geometric measure.
template <class Urbg>
std::int64_t sample_k1_geometric(CountCache const& cache, GeometricMeasureSpec const& spec, Urbg& rng)
{
    return GeometricSampler(cache, spec).sample_k1(rng);
}

/// One exact draw of a partition under the geometric measure.
template <class Urbg>
Partition sample_geometric_partition(CountCache const& cache, GeometricMeasureSpec const& spec, Urbg& rng)
{
    return GeometricSampler(cache, spec).sample_partition(rng);
}

/// Maximum size of an enumerated P_n(m).
inline constexpr std::uint64_t enumeration_limit = 2'000'000;

/// Visit every partition of n into at most m parts in lexicographically
/// decreasing order. The callback receives the nonincreasing parts.
template <class Fn>
void for_each_partition(std::int64_t n, std::int64_t m, Fn&& fn)
{
    if (n < 0 || m < 0)
        throw std::invalid_argument("for_each_partition: negative argument");
    std::vector<std::int64_t> buf;
    buf.reserve(static_cast<std::size_t>(std::min(n, m)));
    auto recurse = [&](auto&& self, std::int64_t rest, std::int64_t slots, std::int64_t cap) -> void {
        if (rest == 0) {
            fn(std::span<std::int64_t const>(buf));
            return;
        }
        if (slots == 0)
            return;
        for (std::int64_t h = std::min(cap, rest); h >= ceil_div(rest, slots); --h) {
            buf.push_back(h);
            self(self, rest - h, slots - 1, h);
            buf.pop_back();
        }
    };
    recurse(recurse, n, m, n);
}

/// All of P_n(m), refusing when |P_n(m)| exceeds the enumeration limit.
inline std::vector<Partition> enumerate_partitions(CountCache const& cache, std::int64_t n, std::int64_t m,
                                                   std::uint64_t limit = enumeration_limit)
{
    BigInt const count = cache.count_at_most(n, m);
    if (count > BigInt(static_cast<unsigned long>(limit)))
        throw RefusalError("enumerate_partitions: |P_" + std::to_string(n) + "(" + std::to_string(m)
                           + ")| = " + count.get_str() + " exceeds the enumeration limit "
                           + std::to_string(limit));
    std::vector<Partition> out;
    out.reserve(count.get_ui());
    for_each_partition(n, m, [&](std::span<std::int64_t const> parts) {
        out.emplace_back(std::vector<std::int64_t>(parts.begin(), parts.end()), m);
    });
    return out;
}

/// Density on the closed ordered simplex, evaluated at (k1/n, ..., km/n).
using Density = std::function<double(std::span<double const>)>;

/// P(kappa) proportional to density(k1/n, ..., km/n) on P_n(m).
struct GeneralMeasureSpec
{
    std::int64_t n = 0;
    std::int64_t m = 0;
    Density density;
    /// Caller-certified upper bound of the density.
    double sup_bound = 1.0;
    std::optional<double> lipschitz_hint = std::nullopt;

    void validate() const
    {
        if (n < 1 || m < 2 || m > n)
            throw std::invalid_argument("GeneralMeasureSpec: need 2 <= m <= n");
        if (!density)
            throw std::invalid_argument("GeneralMeasureSpec: missing density");
        if (!(sup_bound > 0.0) || !std::isfinite(sup_bound))
            throw std::invalid_argument("GeneralMeasureSpec: sup_bound must be finite and > 0");
    }
};

/// Unnormalized symmetric Dirichlet kernel prod y_i^{alpha - 1}.
inline Density dirichlet_kernel(double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("dirichlet_kernel: alpha must be > 0");
    return [alpha](std::span<double const> y) {
        double log_v = 0.0;
        for (double yi : y) {
            if (yi == 0.0)
                return alpha == 1.0 ? 1.0 : (alpha > 1.0 ? 0.0 : std::numeric_limits<double>::infinity());
            log_v += (alpha - 1.0) * std::log(yi);
        }
        return std::exp(log_v);
    };
}

/// Maximum of the Dirichlet kernel over the simplex (attained at y_i = 1/m), alpha >= 1.
inline double dirichlet_kernel_sup(std::int64_t m, double alpha)
{
    if (!(alpha >= 1.0))
        throw std::invalid_argument("dirichlet_kernel_sup: unbounded for alpha < 1");
    auto const md = static_cast<double>(m);
    return std::exp(-md * (alpha - 1.0) * std::log(md));
}

/// Exact sampler for the density-weighted measure.
///
/// Small P_n(m) (at most enumeration_limit elements) is enumerated once and
/// drawn by inverse CDF. Otherwise uniform proposals on P_n(m) are accepted
/// with probability density / sup_bound.
class GeneralSampler
{
  public:
    static constexpr std::uint64_t max_proposals = 10'000'000;
    static constexpr double min_acceptance = 1e-6;

    GeneralSampler(CountCache& cache, GeneralMeasureSpec spec, std::uint64_t limit = enumeration_limit)
        : cache_(&cache), spec_(std::move(spec))
    {
        spec_.validate();
        if (spec_.n > GeometricSampler::table_budget / spec_.m)
            throw RefusalError("general sampling needs a count table of n*m = " + std::to_string(spec_.n) + "*"
                               + std::to_string(spec_.m) + " cells, above the budget of "
                               + std::to_string(GeometricSampler::table_budget));
        BigInt const count = cache.count_at_most(spec_.n, spec_.m);
        if (count <= BigInt(static_cast<unsigned long>(limit))) {
            enumerate();
        } else {
            cache.reserve_columns(spec_.m, spec_.n);
        }
    }

    GeneralMeasureSpec const& spec() const noexcept { return spec_; }
    bool uses_enumeration() const noexcept { return enumerated_; }
    std::uint64_t proposals() const noexcept { return proposals_.load(); }
    std::uint64_t acceptances() const noexcept { return accepted_.load(); }

    template <class Urbg>
    Partition sample(Urbg& rng) const
    {
        if (enumerated_) {
            std::size_t const idx = table_.sample(rng);
            auto const m = static_cast<std::size_t>(spec_.m);
            std::vector<std::int64_t> parts;
            for (std::size_t i = 0; i < m; ++i) {
                auto const v = flat_[idx * m + i];
                if (v > 0)
                    parts.push_back(v);
            }
            return Partition(std::move(parts), spec_.m);
        }
        return sample_by_rejection(rng);
    }

  private:
    void point_of(std::span<std::int64_t const> parts, std::vector<double>& y) const
    {
        y.assign(static_cast<std::size_t>(spec_.m), 0.0);
        auto const nd = static_cast<double>(spec_.n);
        for (std::size_t i = 0; i < parts.size(); ++i)
            y[i] = static_cast<double>(parts[i]) / nd;
    }

    double checked_density(std::span<std::int64_t const> parts, std::vector<double>& y) const
    {
        point_of(parts, y);
        double const w = spec_.density(y);
        if (!(w >= 0.0))
            throw std::domain_error("GeneralSampler: density is negative or NaN at " + describe(parts));
        if (w > spec_.sup_bound)
            throw std::domain_error("GeneralSampler: density " + format_double(w) + " exceeds sup_bound "
                                    + format_double(spec_.sup_bound) + " at " + describe(parts));
        return w;
    }

    std::string describe(std::span<std::int64_t const> parts) const
    {
        std::string s = "(";
        for (std::size_t i = 0; i < parts.size(); ++i)
            s += (i ? "," : "") + std::to_string(parts[i]);
        return s + ")/" + std::to_string(spec_.n);
    }

    void enumerate()
    {
        auto const m = static_cast<std::size_t>(spec_.m);
        std::vector<double> weights;
        std::vector<double> y;
        for_each_partition(spec_.n, spec_.m, [&](std::span<std::int64_t const> parts) {
            weights.push_back(checked_density(parts, y));
            std::size_t const at = flat_.size();
            flat_.resize(at + m, 0);
            std::copy(parts.begin(), parts.end(), flat_.begin() + static_cast<std::ptrdiff_t>(at));
        });
        table_ = CumulativeTable(weights);
        enumerated_ = true;
    }

    template <class Urbg>
    Partition sample_by_rejection(Urbg& rng) const
    {
        std::vector<double> y;
        for (;;) {
            Partition p = sample_uniform_bounded(*cache_, spec_.n, spec_.m, spec_.n, rng);
            std::uint64_t const tried = ++proposals_;
            double const w = checked_density(p.parts(), y);
            if (uniform01(rng) * spec_.sup_bound < w) {
                ++accepted_;
                return p;
            }
            if (tried >= max_proposals
                && static_cast<double>(accepted_.load()) < min_acceptance * static_cast<double>(tried))
                throw RefusalError("GeneralSampler: acceptance rate " + format_double(
                                       static_cast<double>(accepted_.load()) / static_cast<double>(tried))
                                   + " after " + std::to_string(tried) + " proposals; sup_bound "
                                   + format_double(spec_.sup_bound) + " is likely far above the density");
        }
    }

    CountCache* cache_;
    GeneralMeasureSpec spec_;
    bool enumerated_ = false;
    std::vector<std::int64_t> flat_;
    CumulativeTable table_;
    mutable std::atomic<std::uint64_t> proposals_{0};
    mutable std::atomic<std::uint64_t> accepted_{0};
};

/// Decreasing order statistics of a symmetric Dirichlet(alpha) vector of length m.
template <class Urbg>
SimplexPoint sample_dirichlet_order_stats(std::int64_t m, double alpha, Urbg& rng)
{
    if (m < 2)
        throw std::invalid_argument("sample_dirichlet_order_stats: need m >= 2");
    if (!(alpha > 0.0))
        throw std::invalid_argument("sample_dirichlet_order_stats: alpha must be > 0");
    std::vector<double> x(static_cast<std::size_t>(m));
    double sum = 0.0;
    do {
        sum = 0.0;
        for (auto& xi : x) {
            xi = gamma_variate(rng, alpha);
            sum += xi;
        }
    } while (!(sum > 0.0));
    for (auto& xi : x)
        xi /= sum;
    std::sort(x.begin(), x.end(), std::greater<>());
    return SimplexPoint{std::move(x)};
}

}  // namespace partition_lab
