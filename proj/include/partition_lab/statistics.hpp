#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "discrete_pmf.hpp"

namespace partition_lab {

/// Total variation distance over the union of supports.
inline double tv_distance(DiscretePmf const& p, DiscretePmf const& r)
{
    if (p.probs.empty() && r.probs.empty())
        return 0.0;
    std::int64_t lo = std::min(p.probs.empty() ? r.first() : p.first(), r.probs.empty() ? p.first() : r.first());
    std::int64_t hi = std::max(p.probs.empty() ? r.last() : p.last(), r.probs.empty() ? p.last() : r.last());
    double s = 0.0;
    for (std::int64_t x = lo; x <= hi; ++x)
        s += std::abs(p.at(x) - r.at(x));
    return 0.5 * s;
}

/// Total variation distance between two laws on arbitrary keys.
template <class Key>
double tv_distance(std::map<Key, double> const& p, std::map<Key, double> const& r)
{
    double s = 0.0;
    for (auto const& [k, v] : p) {
        auto it = r.find(k);
        s += std::abs(v - (it == r.end() ? 0.0 : it->second));
    }
    for (auto const& [k, v] : r)
        if (!p.contains(k))
            s += std::abs(v);
    return 0.5 * s;
}

/// One-sample KS statistic: max over sorted samples of
/// max(|i/N - F(x_i)|, |(i-1)/N - F(x_i)|).
inline double ks_statistic(std::vector<double> samples, std::function<double(double)> const& cdf)
{
    if (samples.empty())
        throw std::invalid_argument("ks_statistic: need at least one sample");
    std::sort(samples.begin(), samples.end());
    auto const nd = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double const f = cdf(samples[i]);
        d = std::max({d, std::abs(static_cast<double>(i + 1) / nd - f), std::abs(static_cast<double>(i) / nd - f)});
    }
    return d;
}

/// Two-sample KS statistic sup_x |F_a(x) - F_b(x)|, with ties handled exactly.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: need nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    auto const na = static_cast<double>(a.size());
    auto const nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t k = 0;
    double d = 0.0;
    while (i < a.size() && k < b.size()) {
        double const x = std::min(a[i], b[k]);
        while (i < a.size() && a[i] == x)
            ++i;
        while (k < b.size() && b[k] == x)
            ++k;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(k) / nb));
    }
    return d;
}

/// Pearson chi-square goodness of fit.
struct ChiSquareResult
{
    double statistic = 0.0;
    std::int64_t dof = 0;
    double p_value = 1.0;
};

/// Upper tail P(chi2_dof >= x).
inline double chi_square_sf(double x, double dof)
{
    if (!(dof > 0.0))
        throw std::invalid_argument("chi_square_sf: dof must be > 0");
    if (x <= 0.0)
        return 1.0;
    return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

/// Observed counts against expected probabilities (renormalized over the
/// given cells); dof = cells - 1.
inline ChiSquareResult chi_square_gof(std::span<std::uint64_t const> observed, std::span<double const> expected_probs)
{
    if (observed.size() != expected_probs.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_gof: need matching cell vectors of length >= 2");
    double total_p = 0.0;
    double total_n = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected_probs[i] > 0.0))
            throw std::invalid_argument("chi_square_gof: expected probabilities must be > 0");
        total_p += expected_probs[i];
        total_n += static_cast<double>(observed[i]);
    }
    ChiSquareResult r;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double const e = total_n * expected_probs[i] / total_p;
        double const diff = static_cast<double>(observed[i]) - e;
        r.statistic += diff * diff / e;
    }
    r.dof = static_cast<std::int64_t>(observed.size()) - 1;
    r.p_value = chi_square_sf(r.statistic, static_cast<double>(r.dof));
    return r;
}

}  // namespace partition_lab
