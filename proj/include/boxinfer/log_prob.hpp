#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "boxinfer/errors.hpp"

namespace boxinfer {

/// Probability held as its natural logarithm. Probability zero is the
/// distinguished `impossible()` element and absorbs under multiplication.
class LogProb {
public:
    constexpr LogProb() = default;

    static constexpr LogProb certain() { return LogProb{0.0}; }
    static constexpr LogProb impossible() {
        return LogProb{-std::numeric_limits<double>::infinity()};
    }

    /// Values up to `kRoundingSlack` above zero are rounding noise and clamp to 0.
    static LogProb from_log(double value) {
        if (std::isnan(value) || value == std::numeric_limits<double>::infinity())
            throw InvalidArgument("log-probability must be a number <= 0");
        if (value > 0.0) {
            if (value > kRoundingSlack)
                throw InvalidArgument("log-probability must be <= 0");
            value = 0.0;
        }
        return LogProb{value};
    }

    static LogProb from_prob(double p) {
        if (!(p >= 0.0 && p <= 1.0))
            throw InvalidArgument("probability must lie in [0, 1]");
        return p == 0.0 ? impossible() : LogProb{std::log(p)};
    }

    constexpr double log() const { return value_; }
    double prob() const { return is_impossible() ? 0.0 : std::exp(value_); }
    constexpr bool is_impossible() const {
        return value_ == -std::numeric_limits<double>::infinity();
    }

    friend LogProb operator*(LogProb a, LogProb b) {
        if (a.is_impossible() || b.is_impossible())
            return impossible();
        return from_log(a.value_ + b.value_);
    }

    friend constexpr bool operator==(LogProb, LogProb) = default;
    friend constexpr auto operator<=>(LogProb a, LogProb b) { return a.value_ <=> b.value_; }

    static constexpr double kRoundingSlack = 1e-12;

private:
    constexpr explicit LogProb(double v) : value_(v) {}

    double value_ = 0.0;
};

/// log(sum(exp(values))) anchored at the largest finite value; -inf when all
/// terms are -inf. The anchor term is pulled out so the remainder goes
/// through log1p.
inline double log_sum_exp(std::span<const double> values) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const auto anchor_it = std::max_element(values.begin(), values.end());
    if (anchor_it == values.end() || *anchor_it == kNegInf)
        return kNegInf;
    const double anchor = *anchor_it;
    double rest = 0.0;
    for (auto it = values.begin(); it != values.end(); ++it)
        if (it != anchor_it && *it != kNegInf)
            rest += std::exp(*it - anchor);
    return anchor + std::log1p(rest);
}

} // namespace boxinfer
