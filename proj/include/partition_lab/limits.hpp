#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "big_int.hpp"
#include "counting.hpp"
#include "discrete_pmf.hpp"
#include "samplers.hpp"

namespace partition_lab {

/// Parameters of the fixed-m limit law of the geometric measure along
/// n = j (mod m), where j in [1, m] (j = m for n divisible by m).
struct LimitLawSpec
{
    std::int64_t m = 2;
    std::int64_t j = 1;
    double q = 0.5;
    double tol = 1e-12;

    void validate() const
    {
        if (m < 2)
            throw std::invalid_argument("LimitLawSpec: need m >= 2");
        if (j < 1 || j > m)
            throw std::invalid_argument("LimitLawSpec: need 1 <= j <= m");
        if (!(q > 0.0 && q < 1.0))
            throw std::invalid_argument("LimitLawSpec: q must lie in (0, 1)");
        if (!(tol > 0.0 && tol < 1.0))
            throw std::invalid_argument("LimitLawSpec: tol must lie in (0, 1)");
    }
};

/// log q^l |P_{m(l+1)-j}(m-1)|.
inline double limit_log_weight(CountCache const& cache, LimitLawSpec const& spec, std::int64_t l)
{
    return static_cast<double>(l) * std::log(spec.q) + log_of(cache.count_at_most(spec.m * (l + 1) - spec.j, spec.m - 1));
}

/// Limit pmf of k1 - ceil(n/m): f(l) = q^l |P_{m(l+1)-j}(m-1)| / Z.
///
/// Terms are added until the certified tail of the series, relative to the
/// partial sum S, is at most tol; probabilities are normalized by S, so each
/// one overstates the exact value by at most a factor 1 + tail_bound.
inline DiscretePmf limit_pmf_k1(CountCache const& cache, LimitLawSpec const& spec)
{
    spec.validate();
    double const log_tol = std::log(spec.tol);
    std::vector<double> log_w;
    double log_sum = -std::numeric_limits<double>::infinity();
    double log_tail = std::numeric_limits<double>::infinity();
    for (std::int64_t l = 0;; ++l) {
        double const lw = limit_log_weight(cache, spec, l);
        log_w.push_back(lw);
        double const hi = std::max(log_sum, lw);
        log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(lw - hi));
        log_tail = log_weighted_tail_bound(spec.q, spec.m, spec.j, l);
        if (log_tail - log_sum <= log_tol)
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

/// Normalizer of the limit law, as the pair (log of the partial sum, relative tail bound).
struct LimitNormalizer
{
    double log_z = 0.0;
    double tail_bound = 0.0;
};

inline LimitNormalizer limit_normalizer(CountCache const& cache, LimitLawSpec const& spec)
{
    DiscretePmf const pmf = limit_pmf_k1(cache, spec);
    // f(0) = |P_{m-j}(m-1)| / Z.
    double const log_w0 = limit_log_weight(cache, spec, 0);
    return {log_w0 - std::log(pmf.probs.front()), pmf.tail_bound};
}

/// Whether l_vec is in the support of the joint limit: l_1 >= 0,
/// nonincreasing, summing to j - m.
inline bool in_joint_support(LimitLawSpec const& spec, std::span<std::int64_t const> l_vec)
{
    if (static_cast<std::int64_t>(l_vec.size()) != spec.m || l_vec.empty() || l_vec[0] < 0)
        return false;
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < l_vec.size(); ++i) {
        if (i + 1 < l_vec.size() && l_vec[i] < l_vec[i + 1])
            return false;
        sum += l_vec[i];
    }
    return sum == spec.j - spec.m;
}

/// Joint limit law of (k_i - ceil(n/m))_i: q^{l_1} / Z on its support, 0 elsewhere.
inline double limit_joint_prob(LimitNormalizer const& z, LimitLawSpec const& spec, std::span<std::int64_t const> l_vec)
{
    if (!in_joint_support(spec, l_vec))
        return 0.0;
    return std::exp(static_cast<double>(l_vec[0]) * std::log(spec.q) - z.log_z);
}

inline double limit_joint_prob(CountCache const& cache, LimitLawSpec const& spec, std::span<std::int64_t const> l_vec)
{
    spec.validate();
    return limit_joint_prob(limit_normalizer(cache, spec), spec, l_vec);
}

/// Every support point of the joint limit with l_1 = l, in lexicographically
/// decreasing order. There are |P_{m(l+1)-j}(m-1)| of them: d_i = l - l_{m+2-i}
/// runs over partitions of m(l+1) - j into at most m - 1 parts.
template <class Fn>
void for_each_joint_point(LimitLawSpec const& spec, std::int64_t l, Fn&& fn)
{
    std::int64_t const total = spec.m * (l + 1) - spec.j;
    std::vector<std::int64_t> l_vec(static_cast<std::size_t>(spec.m));
    std::vector<std::vector<std::int64_t>> points;
    for_each_partition(total, spec.m - 1, [&](std::span<std::int64_t const> d) {
        l_vec[0] = l;
        // d is nonincreasing; l_i = l - d_{m+1-i} keeps l_vec nonincreasing.
        for (std::int64_t i = 1; i < spec.m; ++i) {
            auto const di = static_cast<std::size_t>(spec.m - 1 - i);
            l_vec[static_cast<std::size_t>(i)] = l - (di < d.size() ? d[di] : 0);
        }
        points.push_back(l_vec);
    });
    std::sort(points.begin(), points.end(), std::greater<>());
    for (auto const& p : points)
        fn(std::span<std::int64_t const>(p));
}

/// Standard normal CDF.
inline double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Limit CDF Phi(x / sigma) of (k1 - ceil(n/m) - gamma m) / sqrt(m).
inline double clt_cdf(double x, CltParams const& p)
{
    return normal_cdf(x / p.sigma());
}

inline double clt_cdf(double x, double q)
{
    return clt_cdf(x, clt_params(q));
}

/// Density m! Gamma(m alpha) / Gamma(alpha)^m prod y_i^{alpha-1} of the
/// decreasing order statistics of a symmetric Dirichlet(alpha) vector.
inline double dirichlet_order_density(SimplexPoint const& y, double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("dirichlet_order_density: alpha must be > 0");
    SimplexPoint::checked(y.coords);
    auto const md = static_cast<double>(y.size());
    double log_v = std::lgamma(md + 1.0) + std::lgamma(md * alpha) - md * std::lgamma(alpha);
    for (double yi : y.coords) {
        if (alpha == 1.0)
            continue;
        if (yi == 0.0)
            return alpha > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
        log_v += (alpha - 1.0) * std::log(yi);
    }
    return std::exp(log_v);
}

/// (y_1^alpha, ..., y_m^alpha); the image satisfies sum x_i^{1/alpha} = 1.
inline std::vector<double> power_transform_check(SimplexPoint const& y, double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("power_transform_check: alpha must be > 0");
    std::vector<double> x;
    x.reserve(y.size());
    for (double yi : y.coords)
        x.push_back(std::pow(yi, alpha));
    return x;
}

/// |sum x_i^{1/alpha} - 1| for a transformed point.
inline double power_sphere_residual(std::span<double const> x, double alpha)
{
    double s = 0.0;
    for (double xi : x)
        s += std::pow(xi, 1.0 / alpha);
    return std::abs(s - 1.0);
}

}  // namespace partition_lab
