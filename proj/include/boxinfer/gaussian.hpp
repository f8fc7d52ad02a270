#pragma once

#include <cmath>
#include <numbers>

#include "boxinfer/errors.hpp"

namespace boxinfer {

inline double normal_pdf(double v) {
    return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double v) { return 0.5 * std::erfc(-v / std::numbers::sqrt2); }

/// Intervals at most this wide use the density expansion instead of a CDF
/// difference.
inline constexpr double kNarrowInterval = 1e-8;

/// Standard normal mass of [center - half, center + half]. Taking the
/// half-width directly keeps narrow intervals exact: forming the endpoints
/// first would round away most of a 1e-12 width. Wider intervals subtract
/// upper or lower tails, whichever side keeps both terms small.
inline double normal_interval_mass(double center, double half) {
    if (!std::isfinite(center) || !std::isfinite(half) || half < 0.0)
        throw InvalidArgument("interval needs a finite center and half-width >= 0");
    if (2.0 * half <= kNarrowInterval) {
        // Midpoint rule with its second-order term: phi''/phi = v^2 - 1.
        return normal_pdf(center) * 2.0 * half * (1.0 + (center * center - 1.0) * half * half / 6.0);
    }
    const double lo = center - half, hi = center + half;
    const double s = std::numbers::sqrt2;
    if (lo >= 0.0)
        return 0.5 * (std::erfc(lo / s) - std::erfc(hi / s));
    if (hi <= 0.0)
        return 0.5 * (std::erfc(-hi / s) - std::erfc(-lo / s));
    return 1.0 - 0.5 * std::erfc(hi / s) - 0.5 * std::erfc(-lo / s);
}

/// Probability that a standard normal draw rounds to `value` at `decimals`
/// decimal places, i.e. the mass of [value - d/2, value + d/2] with
/// d = 10^-decimals.
inline double gaussian_tiny_chance(double value, int decimals) {
    if (!std::isfinite(value))
        throw InvalidArgument("value must be finite");
    if (decimals < 1)
        throw InvalidArgument("decimals must be at least 1");
    return normal_interval_mass(value, 0.5 * std::pow(10.0, -decimals));
}

} // namespace boxinfer
