#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "random.hpp"

namespace partition_lab {

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double x)
{
    char buf[32];
    auto const res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Truncated pmf on base_offset, base_offset + 1, ... with a certified bound
/// on the probability mass left out by the truncation.
struct DiscretePmf
{
    std::int64_t base_offset = 0;
    std::vector<double> probs;
    double tail_bound = 0.0;

    std::int64_t first() const { return base_offset; }
    std::int64_t last() const { return base_offset + static_cast<std::int64_t>(probs.size()) - 1; }

    double at(std::int64_t x) const
    {
        if (x < first() || x > last())
            return 0.0;
        return probs[static_cast<std::size_t>(x - base_offset)];
    }

    double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

    double mean() const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i)
            s += probs[i] * static_cast<double>(base_offset + static_cast<std::int64_t>(i));
        return s;
    }
};

/// Empirical pmf from integer-valued draws.
inline DiscretePmf empirical_pmf(std::vector<std::int64_t> const& values)
{
    DiscretePmf pmf;
    if (values.empty())
        return pmf;
    auto const [lo, hi] = std::minmax_element(values.begin(), values.end());
    pmf.base_offset = *lo;
    pmf.probs.assign(static_cast<std::size_t>(*hi - *lo + 1), 0.0);
    double const w = 1.0 / static_cast<double>(values.size());
    for (auto v : values)
        pmf.probs[static_cast<std::size_t>(v - *lo)] += w;
    return pmf;
}

/// CSV form: '#'-prefixed "key: value" header lines, then "offset,probability" rows.
inline void write_pmf_csv(std::ostream& os, DiscretePmf const& pmf,
                          std::vector<std::pair<std::string, std::string>> const& header = {})
{
    for (auto const& [k, v] : header)
        os << "# " << k << ": " << v << "\n";
    os << "# tail_bound: " << format_double(pmf.tail_bound) << "\n";
    os << "offset,probability\n";
    for (std::size_t i = 0; i < pmf.probs.size(); ++i)
        os << pmf.base_offset + static_cast<std::int64_t>(i) << "," << format_double(pmf.probs[i]) << "\n";
}

inline DiscretePmf read_pmf_csv(std::istream& is)
{
    DiscretePmf pmf;
    std::string line;
    bool have_first = false;
    std::int64_t expected = 0;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            auto const key = std::string("# tail_bound: ");
            if (line.rfind(key, 0) == 0)
                pmf.tail_bound = std::stod(line.substr(key.size()));
            continue;
        }
        if (line == "offset,probability")
            continue;
        auto const comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("read_pmf_csv: malformed row '" + line + "'");
        std::int64_t const x = std::stoll(line.substr(0, comma));
        double const p = std::stod(line.substr(comma + 1));
        if (!have_first) {
            pmf.base_offset = x;
            expected = x;
            have_first = true;
        }
        if (x != expected)
            throw std::runtime_error("read_pmf_csv: offsets must be consecutive");
        pmf.probs.push_back(p);
        ++expected;
    }
    return pmf;
}

/// Inverse-CDF sampler over nonnegative weights.
class CumulativeTable
{
  public:
    CumulativeTable() = default;

    explicit CumulativeTable(std::vector<double> const& weights)
    {
        cdf_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("CumulativeTable: weights must be finite and >= 0");
            if (w > 0.0)
                last_positive_ = cdf_.size();
            acc += w;
            cdf_.push_back(acc);
        }
        if (!(acc > 0.0))
            throw std::invalid_argument("CumulativeTable: total weight must be positive");
    }

    std::size_t size() const noexcept { return cdf_.size(); }
    double total() const noexcept { return cdf_.empty() ? 0.0 : cdf_.back(); }

    /// Index i with probability weights[i] / total.
    template <class Urbg>
    std::size_t sample(Urbg& rng) const
    {
        double const target = uniform01(rng) * cdf_.back();
        // upper_bound never lands on a zero-weight entry.
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        if (it == cdf_.end())
            return last_positive_;
        return static_cast<std::size_t>(it - cdf_.begin());
    }

  private:
    std::vector<double> cdf_;
    std::size_t last_positive_ = 0;
};

}  // namespace partition_lab
