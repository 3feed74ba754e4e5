#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bernoulli.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace partition_lab {

/// J(v) = integral_0^v t / (e^t - 1) dt, absolute error <= 1e-12.
///
/// Small v uses the Bernoulli-number power series; otherwise adaptive
/// Gauss-Kronrod, with the integrand extended by its limit 1 at t = 0.
/// Beyond t = 64 the integrand is below 1e-25, so the upper limit is
/// clamped there.
inline double bose_integral(double v)
{
    if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("bose_integral: v must be finite and >= 0");
    if (v == 0.0)
        return 0.0;
    if (v <= 0.5) {
        // t / (e^t - 1) = sum B_k t^k / k!, radius 2 pi; 20 even terms leave < 1e-40.
        double sum = v - 0.25 * v * v;
        double pow_v = v;
        double fact = 1.0;
        for (unsigned k = 1; k <= 20; ++k) {
            pow_v *= v * v;
            fact *= static_cast<double>((2 * k - 1) * (2 * k));
            sum += boost::math::bernoulli_b2n<double>(static_cast<int>(k)) * pow_v / (static_cast<double>(2 * k + 1) * fact);
        }
        return sum;
    }
    auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
    double const upper = std::min(v, 64.0);
    double error = 0.0;
    double const value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, 0.0, upper, 15, 1e-14, &error);
    if (error > 1e-12)
        throw ConvergenceError("bose_integral: quadrature error estimate " + std::to_string(error));
    return value;
}

/// d/dv of J(v).
inline double bose_integrand(double v)
{
    return v == 0.0 ? 1.0 : v / std::expm1(v);
}

/// The unique v > 0 with u^2 J(v) = v^2.
///
/// Safeguarded Newton on h(v) = v^2 - u^2 J(v) inside the bracket
/// [log(1 + u^2), min(u^2, pi u / sqrt 6)]; the lower end follows from
/// e^v - 1 > u^2, the upper from J(v) <= min(v, pi^2/6).
inline double solve_v(double u)
{
    if (!std::isfinite(u) || u <= 0.0)
        throw std::invalid_argument("solve_v: u must be finite and > 0");
    double const u2 = u * u;
    double lo = std::log1p(u2);
    double hi = std::min(u2, u * std::numbers::pi / std::sqrt(6.0));
    if (lo > hi)
        std::swap(lo, hi);
    auto h = [u2](double v) { return v * v - u2 * bose_integral(v); };

    double h_lo = h(lo);
    double h_hi = h(hi);
    if (h_lo == 0.0)
        return lo;
    if (h_hi == 0.0)
        return hi;
    if (h_lo > 0.0 || h_hi < 0.0) {
        // Rounding at the bracket ends for extreme u; widen slightly.
        lo *= 0.5;
        hi *= 2.0;
        h_lo = h(lo);
        h_hi = h(hi);
        if (h_lo > 0.0 || h_hi < 0.0)
            throw ConvergenceError("solve_v: failed to bracket root for u = " + std::to_string(u));
    }

    double v = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        double const hv = h(v);
        double const scale = std::max(1.0, v * v);
        if (std::abs(hv) <= 1e-13 * scale)
            return v;
        if (hv < 0.0)
            lo = v;
        else
            hi = v;
        double const dh = 2.0 * v - u2 * bose_integrand(v);
        double next = dh > 0.0 ? v - hv / dh : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (next == v || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * v) {
            if (std::abs(h(next)) <= 1e-12 * scale)
                return next;
            break;
        }
        v = next;
    }
    double const hv = h(v);
    if (std::abs(hv) <= 1e-12 * std::max(1.0, v * v))
        return v;
    throw ConvergenceError("solve_v: no convergence for u = " + std::to_string(u));
}

/// g(u) = 2v/u - u log(1 - e^{-v}), given a solved v.
inline double szekeres_g_at(double u, double v)
{
    return 2.0 * v / u - u * std::log(-std::expm1(-v));
}

inline double szekeres_g(double u)
{
    return szekeres_g_at(u, solve_v(u));
}

/// Closed form g'(u) = -log(1 - e^{-v(u)}).
inline double szekeres_g_prime(double u)
{
    return -std::log(-std::expm1(-solve_v(u)));
}

/// f(u) = v / (2^{3/2} pi u) * (1 - e^{-v} - u^2 e^{-v} / 2)^{-1/2}, given v.
inline double szekeres_f_at(double u, double v)
{
    double const radicand = -std::expm1(-v) - 0.5 * u * u * std::exp(-v);
    if (!(radicand > 0.0))
        throw std::domain_error("szekeres_f: non-positive radicand at u = " + std::to_string(u));
    return v / (2.0 * std::numbers::sqrt2 * std::numbers::pi * u) / std::sqrt(radicand);
}

inline double szekeres_f(double u)
{
    return szekeres_f_at(u, solve_v(u));
}

/// One evaluation of the Szekeres estimate |P_n(k)| ~ f(u)/n * exp(sqrt(n) g(u)).
struct SzekeresEval
{
    double u = 0.0;
    double v = 0.0;
    double f_val = 0.0;
    double g_val = 0.0;
    double log_estimate = 0.0;
    /// false when k < n^{1/6}, outside the range where the estimate is uniform.
    bool in_uniform_range = true;
};

inline SzekeresEval szekeres_eval(std::int64_t n, std::int64_t k)
{
    if (n < 1 || k < 1)
        throw std::invalid_argument("szekeres_log_estimate: need n >= 1, k >= 1");
    SzekeresEval e;
    auto const nd = static_cast<double>(n);
    e.u = static_cast<double>(k) / std::sqrt(nd);
    e.v = solve_v(e.u);
    e.f_val = szekeres_f_at(e.u, e.v);
    e.g_val = szekeres_g_at(e.u, e.v);
    e.log_estimate = std::log(e.f_val) - std::log(nd) + std::sqrt(nd) * e.g_val;
    e.in_uniform_range = static_cast<double>(k) >= std::pow(nd, 1.0 / 6.0);
    return e;
}

inline double szekeres_log_estimate(std::int64_t n, std::int64_t k)
{
    return szekeres_eval(n, k).log_estimate;
}

/// psi(t) = g(t)/t - lambda/t^2.
inline double psi(double t, double lambda)
{
    if (!(t > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("psi: need t > 0, lambda > 0");
    return szekeres_g(t) / t - lambda / (t * t);
}

/// Closed-form psi'(t) = 2 (lambda - v(t)) / t^3.
inline double psi_prime(double t, double lambda)
{
    return 2.0 * (lambda - solve_v(t)) / (t * t * t);
}

/// Closed-form psi''(t) = (4v - 6 lambda - v t^2 / (e^v - 1 - t^2/2)) / t^4.
inline double psi_second(double t, double lambda)
{
    double const v = solve_v(t);
    double const t2 = t * t;
    return (4.0 * v - 6.0 * lambda - v * t2 / (std::expm1(v) - 0.5 * t2)) / (t2 * t2);
}

/// Maximizer of psi(., lambda): t0 = lambda / sqrt(J(lambda)).
inline double psi_argmax(double lambda)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("psi_argmax: need lambda > 0");
    return lambda / std::sqrt(bose_integral(lambda));
}

/// Constants of the largest-part CLT under the geometric measure.
struct CltParams
{
    double q = 0.0;
    double lambda = 0.0;
    double t0 = 0.0;
    double gamma = 0.0;
    double sigma2 = 0.0;
    double psi2_t0 = 0.0;

    double sigma() const { return std::sqrt(sigma2); }
};

inline CltParams clt_params(double q)
{
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("clt_params: q must lie in (0, 1)");
    CltParams p;
    p.q = q;
    p.lambda = -std::log(q);
    double const j = bose_integral(p.lambda);
    double const em1 = std::expm1(p.lambda);
    p.t0 = p.lambda / std::sqrt(j);
    p.gamma = j / (p.lambda * p.lambda);
    p.sigma2 = 2.0 * j / (p.lambda * p.lambda * p.lambda) - 1.0 / (p.lambda * em1);
    double const t0_2 = p.t0 * p.t0;
    p.psi2_t0 = -2.0 * p.lambda * em1 / (t0_2 * t0_2 * (em1 - 0.5 * t0_2));
    return p;
}

/// sigma^2 via the Laplace curvature: 4 / (|psi''(t0)| t0^6).
inline double sigma2_from_curvature(CltParams const& p)
{
    return 4.0 / (std::abs(p.psi2_t0) * std::pow(p.t0, 6));
}

}  // namespace partition_lab
