#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "big_int.hpp"

namespace partition_lab {

/// Generator behind every stream: 64-bit Mersenne Twister (period 2^19937 - 1).
/// Its output sequence is fixed by the C++ standard, so draws reproduce
/// across platforms given the same seed.
using Rng = std::mt19937_64;

/// Independent stream for (seed, stream index), via std::seed_seq.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x70617274u};
    return Rng(seq);
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
template <class Urbg>
double uniform01(Urbg& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
template <class Urbg>
double uniform01_open_low(Urbg& rng)
{
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection on the bit length.
template <class Urbg>
std::uint64_t uniform_below(Urbg& rng, std::uint64_t bound)
{
    if (bound == 0)
        throw std::invalid_argument("uniform_below: empty range");
    // 2^64 mod bound; draws below it would bias the low residues.
    std::uint64_t const threshold = (std::uint64_t{0} - bound) % bound;
    for (;;) {
        std::uint64_t const x = rng();
        if (x >= threshold)
            return x % bound;
    }
}

/// Uniform big integer in [0, bound), by rejection on whole 64-bit limbs.
template <class Urbg>
BigInt uniform_below(Urbg& rng, BigInt const& bound)
{
    if (sgn(bound) <= 0)
        throw std::invalid_argument("uniform_below: empty range");
    if (mpz_fits_ulong_p(bound.get_mpz_t()))
        return BigInt(static_cast<unsigned long>(uniform_below(rng, static_cast<std::uint64_t>(bound.get_ui()))));
    std::size_t const bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    std::size_t const words = (bits + 63) / 64;
    unsigned const top_bits = static_cast<unsigned>(bits - 64 * (words - 1));
    std::uint64_t const top_mask = top_bits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << top_bits) - 1);
    std::vector<std::uint64_t> limbs(words);
    BigInt x;
    for (;;) {
        for (auto& w : limbs)
            w = rng();
        limbs.back() &= top_mask;
        mpz_import(x.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, limbs.data());
        if (x < bound)
            return x;
    }
}

/// Standard normal variate (Marsaglia polar method).
template <class Urbg>
double standard_normal(Urbg& rng)
{
    for (;;) {
        double const a = 2.0 * uniform01(rng) - 1.0;
        double const b = 2.0 * uniform01(rng) - 1.0;
        double const s = a * a + b * b;
        if (s > 0.0 && s < 1.0)
            return a * std::sqrt(-2.0 * std::log(s) / s);
    }
}

/// Gamma(shape, 1) variate (Marsaglia-Tsang; shape < 1 by the U^{1/shape} boost).
template <class Urbg>
double gamma_variate(Urbg& rng, double shape)
{
    if (!(shape > 0.0))
        throw std::invalid_argument("gamma_variate: shape must be > 0");
    if (shape < 1.0) {
        double const g = gamma_variate(rng, shape + 1.0);
        return g * std::pow(uniform01_open_low(rng), 1.0 / shape);
    }
    double const d = shape - 1.0 / 3.0;
    double const c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double const u = uniform01_open_low(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

}  // namespace partition_lab
