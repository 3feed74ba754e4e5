#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace partition_lab {

/// Arbitrary-precision nonnegative counts.
using BigInt = mpz_class;

/// Natural log of a positive big integer.
///
/// The value is split into a double mantissa in [0.5, 1) and a binary
/// exponent, so counts far beyond the double range keep ~15 significant
/// digits. Returns -infinity for zero.
inline double log_of(BigInt const& x)
{
    if (sgn(x) < 0)
        throw std::domain_error("log_of: negative argument");
    if (sgn(x) == 0)
        return -std::numeric_limits<double>::infinity();
    long exponent = 0;
    double const mantissa = mpz_get_d_2exp(&exponent, x.get_mpz_t());
    return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

/// Ratio a / b as a double, without overflowing when both are huge.
inline double ratio_of(BigInt const& a, BigInt const& b)
{
    if (sgn(b) == 0)
        throw std::domain_error("ratio_of: zero denominator");
    if (sgn(a) == 0)
        return 0.0;
    return std::exp(log_of(a) - log_of(b));
}

inline std::string to_string(BigInt const& x)
{
    return x.get_str();
}

inline BigInt big_from_u64(std::uint64_t v)
{
    BigInt r;
    mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
    return r;
}

}  // namespace partition_lab
