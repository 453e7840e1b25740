#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cetk/error.hpp"

namespace cetk {

/// Digamma for x > 0: upward recurrence to x >= 6, then the asymptotic
/// series  ln x - 1/(2x) - sum B_2k / (2k x^2k).
inline double digamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("digamma: argument must be positive and finite");
    }
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // B2/2, B4/4, ..., B14/14
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 -
                                                inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
    return acc + std::log(x) - 0.5 * inv - series;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile: probability must lie in (0, 1)");
    }
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, p);
}

/// Log-volume of the unit ball in d dimensions under the max norm (2^d) or
/// the Euclidean norm (pi^{d/2} / Gamma(d/2 + 1)).
inline double log_unit_ball_chebyshev(int d) { return d * std::numbers::ln2; }

inline double log_unit_ball_euclidean(int d) {
    return 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
}

/// First-order Debye function D1(x) = (1/x) * int_0^x t / (e^t - 1) dt.
inline double debye1(double x) {
    if (x == 0.0) {
        return 1.0;
    }
    const auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, x, 15, 1e-14);
    return integral / x;
}

}  // namespace cetk
