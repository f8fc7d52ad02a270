#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include "boxinfer/errors.hpp"
#include "boxinfer/log_prob.hpp"

namespace boxinfer {

/// Ball color. The numeric encoding matches the 0/1 sequence files.
enum class Color : std::uint8_t { Black = 0, White = 1 };

constexpr int to_int(Color c) { return static_cast<int>(c); }

inline Color color_from_int(int v) {
    if (v != 0 && v != 1)
        throw InvalidArgument("color code must be 0 (Black) or 1 (White), got " +
                              std::to_string(v));
    return static_cast<Color>(v);
}

constexpr char to_letter(Color c) { return c == Color::White ? 'W' : 'B'; }

/// The hypothesis space: m+1 boxes, box i holding i White balls out of m.
class BoxModel {
public:
    static constexpr unsigned kDefaultBalls = 5;

    explicit BoxModel(unsigned m = kDefaultBalls) : m_(m) {
        if (m == 0)
            throw InvalidArgument("a box must contain at least one ball (m >= 1)");
    }

    unsigned balls() const { return m_; }
    std::size_t boxes() const { return std::size_t{m_} + 1; }
    std::size_t last_box() const { return m_; }

    void check_box(std::size_t box) const {
        if (box > m_)
            throw InvalidArgument("box index " + std::to_string(box) +
                                  " out of range 0.." + std::to_string(m_));
    }

    /// Probability that a single draw from `box` is White.
    double propensity(std::size_t box) const {
        check_box(box);
        return static_cast<double>(box) / m_;
    }

    /// ln P(White | box); impossible for box 0.
    LogProb log_white(std::size_t box) const {
        check_box(box);
        return box == 0 ? LogProb::impossible()
                        : LogProb::from_log(std::log(static_cast<double>(box) / m_));
    }

    /// ln P(Black | box); impossible for the all-White box.
    LogProb log_black(std::size_t box) const {
        check_box(box);
        return box == m_ ? LogProb::impossible()
                         : LogProb::from_log(std::log(static_cast<double>(m_ - box) / m_));
    }

    LogProb log_draw(std::size_t box, Color c) const {
        return c == Color::White ? log_white(box) : log_black(box);
    }

    friend bool operator==(const BoxModel&, const BoxModel&) = default;

private:
    unsigned m_;
};

/// Sufficient statistic of a draw record: n draws, x of them White.
struct SequenceSummary {
    std::uint64_t n = 0;
    std::uint64_t x = 0;

    SequenceSummary() = default;
    SequenceSummary(std::uint64_t draws, std::uint64_t whites) : n(draws), x(whites) {
        if (x > n)
            throw InvalidArgument("summary needs 0 <= x <= n (n=" + std::to_string(n) +
                                  ", x=" + std::to_string(x) + ")");
    }

    std::uint64_t blacks() const { return n - x; }

    SequenceSummary plus(Color c) const {
        return {n + 1, x + (c == Color::White ? 1u : 0u)};
    }

    friend bool operator==(const SequenceSummary&, const SequenceSummary&) = default;
};

} // namespace boxinfer
