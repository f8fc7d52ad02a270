#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "boxinfer/errors.hpp"
#include "boxinfer/model.hpp"

namespace boxinfer {

struct Generated {
    std::size_t box = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const Generated&, const Generated&) = default;
};
struct Loaded {
    std::string path;
    friend bool operator==(const Loaded&, const Loaded&) = default;
};
struct Live {
    friend bool operator==(const Live&, const Live&) = default;
};
using Provenance = std::variant<Generated, Loaded, Live>;

/// Ordered record of draws plus where it came from.
class ObservationSequence {
public:
    ObservationSequence() : provenance_(Live{}) {}
    explicit ObservationSequence(std::vector<Color> draws, Provenance provenance = Live{})
        : draws_(std::move(draws)), provenance_(std::move(provenance)) {
        for (Color c : draws_)
            whites_ += c == Color::White ? 1u : 0u;
    }

    std::span<const Color> draws() const& { return draws_; }
    std::span<const Color> draws() const&& = delete;
    std::size_t size() const { return draws_.size(); }
    bool empty() const { return draws_.empty(); }
    Color operator[](std::size_t k) const { return draws_.at(k); }
    const Provenance& provenance() const { return provenance_; }

    SequenceSummary summary() const { return {draws_.size(), whites_}; }

    void push_back(Color c) {
        draws_.push_back(c);
        whites_ += c == Color::White ? 1u : 0u;
    }

    void pop_back() {
        if (draws_.empty())
            throw InvalidArgument("cannot pop from an empty sequence");
        whites_ -= draws_.back() == Color::White ? 1u : 0u;
        draws_.pop_back();
    }

    /// Draws [first, first+count) as a new sequence with the same provenance.
    ObservationSequence slice(std::size_t first, std::size_t count) const {
        first = std::min(first, draws_.size());
        count = std::min(count, draws_.size() - first);
        return ObservationSequence(
            std::vector<Color>(draws_.begin() + static_cast<std::ptrdiff_t>(first),
                               draws_.begin() + static_cast<std::ptrdiff_t>(first + count)),
            provenance_);
    }

    /// Equality compares draws only.
    friend bool operator==(const ObservationSequence& a, const ObservationSequence& b) {
        return a.draws_ == b.draws_;
    }

private:
    std::vector<Color> draws_;
    std::uint64_t whites_ = 0;
    Provenance provenance_;
};

/// Name of the draw generator. Bump the suffix if the mapping ever changes;
/// files generated under one version must stay reproducible.
inline constexpr std::string_view kGeneratorName = "mt19937_64/u53-lt v1";

/// Uniform double in [0,1) from the top 53 bits of one engine output. Used
/// instead of std::uniform_real_distribution, whose algorithm is
/// implementation-defined.
inline double unit_uniform(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// n independent draws from `box`: White iff u < i/m. mt19937_64's output
/// sequence is fixed by the C++ standard, so results match across platforms.
inline ObservationSequence generate(const BoxModel& model, std::size_t box, std::size_t n,
                                    std::uint64_t seed) {
    const double p = model.propensity(box);
    std::mt19937_64 engine(seed);
    std::vector<Color> draws(n);
    for (auto& d : draws)
        d = unit_uniform(engine) < p ? Color::White : Color::Black;
    return ObservationSequence(std::move(draws), Generated{box, seed});
}

struct RunPartition {
    std::size_t run_length = 100;
    std::vector<ObservationSequence> runs;
};

inline constexpr std::size_t kDefaultRunLength = 100;

/// Consecutive runs of `run_length` draws; a shorter remainder run is kept.
inline RunPartition split_runs(const ObservationSequence& seq,
                               std::size_t run_length = kDefaultRunLength) {
    if (run_length == 0)
        throw InvalidArgument("run length must be at least 1");
    RunPartition out{run_length, {}};
    for (std::size_t first = 0; first < seq.size(); first += run_length)
        out.runs.push_back(seq.slice(first, run_length));
    return out;
}

} // namespace boxinfer
