#pragma once

// CSV and JSON renderings of the analysis tables. CSV numbers use scientific
// notation with 10 significant digits; exact zeros print as 0, undefined
// values as NA, infinities as Inf/-Inf. JSON uses shortest round-trip
// decimals, exact zeros as integer 0 and null for undefined or infinite.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boxinfer/analysis.hpp"
#include "boxinfer/gaussian.hpp"

namespace boxinfer {

enum class Format { Csv, Json };

inline std::string csv_number(double v) {
    if (v == 0.0)
        return "0";
    if (std::isnan(v))
        return "NA";
    if (std::isinf(v))
        return v > 0 ? "Inf" : "-Inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

inline std::string csv_number(const std::optional<double>& v) {
    return v ? csv_number(*v) : "NA";
}

inline nlohmann::json json_number(double v) {
    if (v == 0.0)
        return 0;
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

inline nlohmann::json json_number(const std::optional<double>& v) {
    return v ? json_number(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json json_numbers(const std::vector<double>& values) {
    auto arr = nlohmann::json::array();
    for (double v : values)
        arr.push_back(json_number(v));
    return arr;
}

/// Serialization clamp for trajectory posteriors: boxes still possible never
/// print as 0 even when exp() underflows.
inline constexpr double kPosteriorFloor = 1e-300;

inline std::vector<double> clamped_posterior(const TrajectoryPoint& p) {
    std::vector<double> out(p.posterior.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::isinf(p.log_posterior[i]) ? 0.0 : std::max(p.posterior[i], kPosteriorFloor);
    return out;
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& points,
                                 const BoxModel& model) {
    out << "step,observed,n,x,predictive_white,frequency_white,misused_laplace_white,"
           "floor_box,log_excess_over_floor";
    for (std::size_t i = 0; i < model.boxes(); ++i)
        out << ",p_B" << i;
    for (std::size_t i = 0; i < model.boxes(); ++i)
        out << ",lnp_B" << i;
    out << '\n';
    for (const auto& p : points) {
        out << p.step << ',' << to_int(p.observed) << ',' << p.summary.n << ',' << p.summary.x
            << ',' << csv_number(p.predictive_white) << ',' << csv_number(p.frequency_white)
            << ',' << csv_number(p.laplace_white) << ',' << p.floor_box << ','
            << csv_number(p.log_excess_over_floor);
        for (double v : clamped_posterior(p))
            out << ',' << csv_number(v);
        for (double v : p.log_posterior)
            out << ',' << csv_number(v);
        out << '\n';
    }
}

inline nlohmann::json trajectory_json(const std::vector<TrajectoryPoint>& points) {
    auto arr = nlohmann::json::array();
    for (const auto& p : points) {
        arr.push_back({
            {"step", p.step},
            {"observed", to_int(p.observed)},
            {"n", p.summary.n},
            {"x", p.summary.x},
            {"posterior", json_numbers(clamped_posterior(p))},
            {"logPosterior", json_numbers(p.log_posterior)},
            {"predictiveWhite", json_number(p.predictive_white)},
            {"frequencyWhite", json_number(p.frequency_white)},
            {"misusedLaplaceWhite", json_number(p.laplace_white)},
            {"floorBox", p.floor_box},
            {"logExcessOverFloor", json_number(p.log_excess_over_floor)},
        });
    }
    return arr;
}

// ---------------------------------------------------------------------------
// Final-state summary
// ---------------------------------------------------------------------------

inline void write_summary_csv(std::ostream& out, const LogPosterior& posterior,
                              const SequenceSummary& s) {
    out << "quantity,value\n";
    out << "n," << s.n << '\n' << "x," << s.x << '\n';
    out << "predictive_white," << csv_number(predictive_white(posterior)) << '\n';
    out << "frequency_white," << csv_number(frequency_estimate(s)) << '\n';
    out << "misused_laplace_white," << csv_number(laplace_rule(s)) << '\n';
    out << "mode_box," << posterior.mode() << '\n';
    for (std::size_t i = 0; i < posterior.size(); ++i)
        out << "p_B" << i << ',' << csv_number(posterior.probability(i)) << '\n';
    for (std::size_t i = 0; i < posterior.size(); ++i)
        out << "lnp_B" << i << ',' << csv_number(posterior.log_weight(i).log()) << '\n';
}

inline nlohmann::json odds_json(const OddsTable& table);

inline nlohmann::json summary_json(const LogPosterior& posterior, const SequenceSummary& s) {
    std::vector<double> logs;
    for (LogProb w : posterior.log_weights())
        logs.push_back(w.log());
    return {
        {"n", s.n},
        {"x", s.x},
        {"posterior", json_numbers(posterior.probabilities())},
        {"logPosterior", json_numbers(logs)},
        {"modeBox", posterior.mode()},
        {"predictiveWhite", json_number(predictive_white(posterior))},
        {"frequencyWhite", json_number(frequency_estimate(s))},
        {"misusedLaplaceWhite", json_number(laplace_rule(s))},
        {"odds", odds_json(odds_table(s, posterior.model()))},
    };
}

// ---------------------------------------------------------------------------
// Anatomy and odds
// ---------------------------------------------------------------------------

inline void write_anatomy_csv(std::ostream& out, const LikelihoodAnatomy& a, const BoxModel& model) {
    out << "box,propensity,posterior,binomial_likelihood,sequence_likelihood\n";
    for (std::size_t i = 0; i < a.per_box.size(); ++i) {
        const auto& r = a.per_box[i];
        out << i << ',' << csv_number(model.propensity(i)) << ',' << csv_number(r.posterior.prob())
            << ',' << csv_number(r.binomial_likelihood.prob()) << ','
            << csv_number(r.sequence_likelihood.prob()) << '\n';
    }
}

inline nlohmann::json anatomy_json(const LikelihoodAnatomy& a, const BoxModel& model) {
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < a.per_box.size(); ++i) {
        const auto& r = a.per_box[i];
        rows.push_back({{"box", i},
                        {"propensity", json_number(model.propensity(i))},
                        {"posterior", json_number(r.posterior.prob())},
                        {"binomialLikelihood", json_number(r.binomial_likelihood.prob())},
                        {"sequenceLikelihood", json_number(r.sequence_likelihood.prob())}});
    }
    return {{"n", a.summary.n}, {"x", a.summary.x}, {"perBox", rows}};
}

inline void write_odds_csv(std::ostream& out, const OddsTable& t) {
    out << "box";
    for (std::size_t j = 0; j < t.odds.size(); ++j)
        out << ",vs_B" << j;
    out << '\n';
    for (std::size_t i = 0; i < t.odds.size(); ++i) {
        out << i;
        for (const auto& v : t.odds[i])
            out << ',' << csv_number(v);
        out << '\n';
    }
}

/// Infinite odds serialize as the string "Infinity", indeterminate as null.
inline nlohmann::json odds_json(const OddsTable& t) {
    auto rows = nlohmann::json::array();
    for (const auto& row : t.odds) {
        auto r = nlohmann::json::array();
        for (const auto& v : row) {
            if (!v)
                r.push_back(nullptr);
            else if (std::isinf(*v))
                r.push_back("Infinity");
            else
                r.push_back(json_number(*v));
        }
        rows.push_back(std::move(r));
    }
    return {{"n", t.summary.n}, {"x", t.summary.x}, {"odds", rows}};
}

// ---------------------------------------------------------------------------
// Approximation report
// ---------------------------------------------------------------------------

inline void write_approximation_csv(std::ostream& out, const std::vector<ApproximationRow>& rows,
                                    const BoxModel& model) {
    out << "n";
    for (std::size_t i = 0; i < model.last_box(); ++i)
        out << ",exact_B" << i << ",approx_B" << i << ",deviation_B" << i;
    out << ",exact_predictive,approx_predictive,deviation_predictive\n";
    for (const auto& r : rows) {
        out << r.n;
        for (std::size_t i = 0; i < r.exact_posterior.size(); ++i)
            out << ',' << csv_number(r.exact_posterior[i]) << ',' << csv_number(r.approx_posterior[i])
                << ',' << csv_number(r.posterior_deviation[i]);
        out << ',' << csv_number(r.exact_predictive) << ',' << csv_number(r.approx_predictive) << ','
            << csv_number(r.predictive_deviation) << '\n';
    }
}

inline nlohmann::json approximation_json(const std::vector<ApproximationRow>& rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"n", r.n},
                       {"exactPosterior", json_numbers(r.exact_posterior)},
                       {"approxPosterior", json_numbers(r.approx_posterior)},
                       {"posteriorDeviation", json_numbers(r.posterior_deviation)},
                       {"exactPredictive", json_number(r.exact_predictive)},
                       {"approxPredictive", json_number(r.approx_predictive)},
                       {"predictiveDeviation", json_number(r.predictive_deviation)}});
    return arr;
}

} // namespace boxinfer
