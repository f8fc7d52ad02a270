#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "boxinfer/model.hpp"
#include "boxinfer/posterior.hpp"
#include "boxinfer/sequence.hpp"

namespace boxinfer {

/// State after the first `step` draws of a sequence.
struct TrajectoryPoint {
    std::size_t step = 0; // 1-based
    Color observed = Color::Black;
    SequenceSummary summary;
    std::vector<double> posterior;
    std::vector<double> log_posterior; // -inf for excluded boxes
    double predictive_white = 0.0;
    std::optional<double> frequency_white;
    double laplace_white = 0.5;
    /// Lowest box still possible and ln(P(White next) - its propensity);
    /// -inf when the predictive sits exactly on that propensity.
    std::size_t floor_box = 0;
    double log_excess_over_floor = -std::numeric_limits<double>::infinity();
};

inline std::size_t lowest_possible_box(const LogPosterior& posterior) {
    std::size_t i = 0;
    while (posterior.is_excluded(i))
        ++i;
    return i;
}

inline TrajectoryPoint snapshot(const LogPosterior& posterior, const SequenceSummary& summary,
                                std::size_t step, Color observed) {
    TrajectoryPoint p;
    p.step = step;
    p.observed = observed;
    p.summary = summary;
    p.posterior = posterior.probabilities();
    p.log_posterior.reserve(posterior.size());
    for (LogProb w : posterior.log_weights())
        p.log_posterior.push_back(w.log());
    p.predictive_white = predictive_white(posterior);
    p.frequency_white = frequency_estimate(summary);
    p.laplace_white = laplace_rule(summary);
    p.floor_box = lowest_possible_box(posterior);
    const auto margin = predictive_margin(posterior, p.floor_box);
    p.log_excess_over_floor = margin.log_above;
    return p;
}

/// Sequential analysis: point k reflects draws 1..k.
inline std::vector<TrajectoryPoint> trajectory(const ObservationSequence& seq,
                                               const LogPosterior& prior) {
    std::vector<TrajectoryPoint> out;
    out.reserve(seq.size());
    LogPosterior current = prior;
    SequenceSummary summary;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        current = posterior_update(current, seq[k]);
        summary = summary.plus(seq[k]);
        out.push_back(snapshot(current, summary, k + 1, seq[k]));
    }
    return out;
}

/// Per-box posterior next to the two likelihoods of the same data: the
/// probability of the count (binomial) and of the ordered sequence.
struct LikelihoodAnatomy {
    struct Row {
        LogProb posterior;
        LogProb binomial_likelihood;
        LogProb sequence_likelihood;
    };
    SequenceSummary summary;
    std::vector<Row> per_box;
};

inline LikelihoodAnatomy anatomy(const SequenceSummary& summary, const BoxModel& model,
                                 const std::optional<LogPosterior>& prior = std::nullopt) {
    const LogPosterior post = posterior_from_summary(prior ? *prior : uniform_prior(model), summary);
    LikelihoodAnatomy out{summary, {}};
    for (std::size_t i = 0; i < model.boxes(); ++i)
        out.per_box.push_back({post.log_weight(i), binomial_log_likelihood(model, i, summary),
                               sequence_log_likelihood(model, i, summary)});
    return out;
}

/// Pairwise Bayes-Turing factors odds[i][j] = P(seq|B_i)/P(seq|B_j).
/// Entries where both boxes are impossible are indeterminate (nullopt).
struct OddsTable {
    SequenceSummary summary;
    std::vector<std::vector<std::optional<double>>> odds;
};

inline OddsTable odds_table(const SequenceSummary& summary, const BoxModel& model) {
    OddsTable out{summary, {}};
    out.odds.assign(model.boxes(), std::vector<std::optional<double>>(model.boxes()));
    for (std::size_t i = 0; i < model.boxes(); ++i)
        for (std::size_t j = 0; j < model.boxes(); ++j) {
            try {
                out.odds[i][j] = bayes_factor(model, i, j, summary);
            } catch (const IndeterminateOdds&) {
                out.odds[i][j] = std::nullopt;
            }
        }
    return out;
}

/// Exact vs closed-form quantities after n Blacks in a row (uniform prior).
struct ApproximationRow {
    std::uint64_t n = 0;
    /// Boxes 0..m-1; the all-White box is excluded by any Black.
    std::vector<double> exact_posterior;
    std::vector<double> approx_posterior;
    /// exact/approx - 1, computed from log values so tiny deviations survive.
    std::vector<double> posterior_deviation;
    double exact_predictive = 0.0;
    double approx_predictive = 0.0;
    double predictive_deviation = 0.0;
};

inline std::vector<ApproximationRow> approximation_report(const BoxModel& model,
                                                          std::uint64_t max_n) {
    if (max_n < 1)
        throw InvalidArgument("approximation report needs maxN >= 1");
    const LogPosterior prior = uniform_prior(model);
    const double m = model.balls();
    std::vector<ApproximationRow> rows;
    rows.reserve(max_n + 1);
    for (std::uint64_t n = 0; n <= max_n; ++n) {
        const LogPosterior post = posterior_from_summary(prior, {n, 0});
        ApproximationRow row;
        row.n = n;
        for (std::size_t i = 0; i < model.last_box(); ++i) {
            const double log_approx = static_cast<double>(n) * std::log((m - i) / m);
            row.exact_posterior.push_back(post.probability(i));
            row.approx_posterior.push_back(approx_posterior_all_black(model, i, n));
            row.posterior_deviation.push_back(std::expm1(post.log_weight(i).log() - log_approx));
        }
        row.exact_predictive = predictive_white(post);
        row.approx_predictive = approx_predictive_all_black(model, n);
        // ln sum_{i>=1} (i/m) P(B_i) against ln((1/m)((m-1)/m)^n); both sides
        // are zero for m = 1 once a Black has been seen.
        const double log_exact = predictive_margin(post, 0).log_above;
        const double log_approx = -std::log(m) + static_cast<double>(n) * std::log((m - 1) / m);
        row.predictive_deviation = (std::isinf(log_exact) && std::isinf(log_approx))
                                       ? 0.0
                                       : std::expm1(log_exact - log_approx);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace boxinfer
