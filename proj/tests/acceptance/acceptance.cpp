// Acceptance gate. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "boxinfer/boxinfer.hpp"
#include "live_server.hpp"
#include "oracle.hpp"

using namespace boxinfer;
using Clock = std::chrono::steady_clock;

namespace {

const BoxModel kSix{5};
constexpr std::uint64_t kSeed = 20160715;

/// Collects failures for one criterion; the first few are echoed.
class Check {
public:
    void fail(const std::string& why) {
        if (failures_ < 5)
            notes_ << "\n      " << why;
        ++failures_;
    }
    void expect(bool ok, const std::string& why) {
        if (!ok)
            fail(why);
    }
    void rel(double actual, double expected, double tol, const std::string& what) {
        const double d = std::fabs(actual - expected) / std::fabs(expected);
        worst_rel_ = std::max(worst_rel_, d);
        if (!(d <= tol))
            fail(what + ": got " + fmt(actual) + ", want " + fmt(expected) + " (rel " + fmt(d) + ")");
    }
    void abs(double actual, double expected, double tol, const std::string& what) {
        const double d = std::fabs(actual - expected);
        if (!(d <= tol))
            fail(what + ": got " + fmt(actual) + ", want " + fmt(expected) + " (abs " + fmt(d) + ")");
    }
    void note(const std::string& s) { extra_ << (extra_.tellp() > 0 ? "; " : "") << s; }

    int failures() const { return failures_; }
    double worst_rel() const { return worst_rel_; }
    std::string notes() const { return notes_.str(); }
    std::string extra() const { return extra_.str(); }

    static std::string fmt(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return buf;
    }

private:
    int failures_ = 0;
    double worst_rel_ = 0.0;
    std::ostringstream notes_, extra_;
};

int g_failed = 0;

void criterion(const std::string& name, const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = Clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.fail(std::string("exception: ") + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    const bool ok = c.failures() == 0;
    g_failed += ok ? 0 : 1;
    std::printf("%s  %-34s %9.2f ms", ok ? "PASS" : "FAIL", name.c_str(), ms);
    if (!c.extra().empty())
        std::printf("  [%s]", c.extra().c_str());
    std::printf("%s\n", c.notes().c_str());
    std::fflush(stdout);
}

std::string box(std::size_t i) { return "B" + std::to_string(i); }

/// Posterior components must match per finite entry; listed zeros must be exact.
void posterior_matches(Check& c, const LogPosterior& p, const std::vector<double>& want, double tol,
                       std::size_t first = 0, std::size_t last = 5) {
    for (std::size_t i = first; i <= last; ++i) {
        if (want[i] == 0.0)
            c.expect(p.is_excluded(i) && p.probability(i) == 0.0, box(i) + " should be exactly 0");
        else
            c.rel(p.probability(i), want[i], tol, "P(" + box(i) + ")");
    }
}

double round_sig(double v, int digits) {
    const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(std::fabs(v))));
    return std::round(v * scale) / scale;
}

std::vector<Color> random_draws(std::mt19937_64& rng, std::size_t n, std::size_t b) {
    const auto seq = generate(kSix, b, n, rng());
    return {seq.draws().begin(), seq.draws().end()};
}

LogPosterior fold(const std::vector<Color>& draws) {
    LogPosterior p = uniform_prior(kSix);
    for (Color c : draws)
        p = posterior_update(p, c);
    return p;
}

} // namespace

int main() {
    std::printf("boxinfer acceptance (generator %s)\n", std::string(kGeneratorName).c_str());

    criterion("oracle n=16 all Black", [](Check& c) {
        const auto t0 = Clock::now();
        const LogPosterior p = posterior_from_summary(uniform_prior(kSix), SequenceSummary(16, 0));
        const double pw = predictive_white(p);
        const double us = std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
        posterior_matches(c, p, {9.723559e-01, 2.736939e-02, 2.743123e-04, 4.176237e-07, 6.372432e-12, 0}, 1e-6);
        c.abs(pw, 0.005583852, 1e-8, "predictive");
        c.expect(us < 1000.0, "runtime " + Check::fmt(us) + " us exceeds 1 ms");
        c.note("kernel " + Check::fmt(us) + " us");
    });

    criterion("oracle n=17 x=1", [](Check& c) {
        const SequenceSummary s(17, 1);
        const auto a = anatomy(s, kSix);
        const LogPosterior p = posterior_from_summary(uniform_prior(kSix), s);
        posterior_matches(c, p, {0, 9.803047e-01, 1.965040e-02, 4.487479e-05, 9.129799e-10, 0}, 1e-6);
        c.abs(predictive_white(p), 0.203948, 1e-6, "predictive");
        const double binom[] = {9.570149e-02, 1.918355e-03, 4.380867e-06, 8.912896e-11};
        const double seq[] = {5.629500e-03, 1.128444e-04, 2.576980e-07, 5.242880e-12};
        for (std::size_t i = 1; i <= 4; ++i) {
            c.rel(a.per_box[i].binomial_likelihood.prob(), binom[i - 1], 1e-6, "binomial " + box(i));
            c.rel(a.per_box[i].sequence_likelihood.prob(), seq[i - 1], 1e-6, "sequence " + box(i));
            const double ratio = std::exp(a.per_box[i].binomial_likelihood.log() -
                                          a.per_box[i].sequence_likelihood.log());
            c.abs(ratio, 17.0, 1e-10, "row ratio " + box(i));
        }
        c.expect(a.per_box[0].binomial_likelihood.is_impossible() && a.per_box[5].binomial_likelihood.is_impossible(),
                 "B0 and B5 rows should be exactly 0");
    });

    criterion("oracle n=100 x=18", [](Check& c) {
        const SequenceSummary s(100, 18);
        const LogPosterior p = posterior_from_summary(uniform_prior(kSix), s);
        posterior_matches(c, p, {0, 9.999851e-01, 1.491273e-05, 8.011548e-17, 2.938692e-39, 0}, 1e-6);
        const double seq[] = {2.964277e-21, 4.420612e-26, 2.374881e-37, 8.711229e-60};
        for (std::size_t i = 1; i <= 4; ++i)
            c.rel(sequence_log_likelihood(kSix, i, s).prob(), seq[i - 1], 1e-6, "sequence " + box(i));
        // Published odds carry 2 significant figures; compare at that precision.
        const double published[] = {6.7e4, 1.2e16, 3.4e38};
        for (std::size_t j = 2; j <= 4; ++j) {
            const double odds = bayes_factor(kSix, 1, j, s);
            c.rel(round_sig(odds, 2), published[j - 2], 0.01, "odds B1:" + box(j));
            c.note("B1:" + box(j) + " " + Check::fmt(odds) + " (raw rel " +
                   Check::fmt(std::fabs(odds - published[j - 2]) / published[j - 2]) + ")");
        }
    });

    criterion("oracle 100 Blacks", [](Check& c) {
        const SequenceSummary s(100, 0);
        const LogPosterior p = posterior_from_summary(uniform_prior(kSix), s);
        posterior_matches(c, p, {0, 2.037036e-10, 6.533186e-23, 1.606938e-40, 1.267651e-70, 0}, 1e-5, 1, 5);
        c.expect(p.probability(0) < 1.0 && p.probability(0) > 1.0 - 1e-9, "P(B0) should be 1 - eps");
        c.rel(predictive_white(p), 4e-11, 0.02, "predictive vs 4e-11");
        c.expect(laplace_rule(s) == 1.0 / 102.0, "misused Laplace should be exactly 1/102");
        c.note("predictive " + Check::fmt(predictive_white(p)));
    });

    criterion("oracle gaussian tiny chance", [](Check& c) {
        c.rel(gaussian_tiny_chance(1.479427401471, 12), 1.34e-13, 0.01, "v=1.479427401471");
        c.rel(gaussian_tiny_chance(-0.762658301757, 12), 2.98e-13, 0.01, "v=-0.762658301757");
        c.note(Check::fmt(gaussian_tiny_chance(1.479427401471, 12)) + ", " +
               Check::fmt(gaussian_tiny_chance(-0.762658301757, 12)));
    });

    criterion("property suite (200 sequences)", [](Check& c) {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(kSeed);
        const LogPosterior prior = uniform_prior(kSix);
        int shuffles = 0;
        for (int k = 0; k < 200; ++k) {
            const std::size_t b = static_cast<std::size_t>(k) % kSix.boxes();
            const std::size_t n = k == 0 ? 0 : (k == 1 ? 1000 : rng() % 1001);
            const auto draws = random_draws(rng, n, b);
            const std::string tag = "seq " + std::to_string(k) + " (" + box(b) + ", n=" + std::to_string(n) + ")";
            const ObservationSequence seq(draws);
            const SequenceSummary s = seq.summary();

            LogPosterior p = prior;
            bool zero[6] = {};
            bool both = false, seen[2] = {};
            for (Color d : draws) {
                p = posterior_update(p, d);
                seen[to_int(d)] = true;
                both = seen[0] && seen[1];
                double total = 0.0;
                for (std::size_t i = 0; i < kSix.boxes(); ++i) {
                    total += p.probability(i);
                    if (zero[i] && !p.is_excluded(i))
                        c.fail(tag + ": " + box(i) + " revived");
                    zero[i] = zero[i] || p.is_excluded(i);
                }
                if (std::fabs(total - 1.0) > 1e-12)
                    c.fail(tag + ": sum " + Check::fmt(total));
                if (both) {
                    const bool above = predictive_margin(p, 1).compare() == std::partial_ordering::greater;
                    const bool below = predictive_margin(p, 4).compare() == std::partial_ordering::less;
                    if (!above || !below)
                        c.fail(tag + ": predictive outside (0.2, 0.8)");
                }
            }

            const LogPosterior batch = posterior_from_summary(prior, s);
            for (std::size_t i = 0; i < kSix.boxes(); ++i) {
                if (std::fabs(batch.probability(i) - p.probability(i)) > 1e-9)
                    c.fail(tag + ": fold vs batch " + box(i));
                const LogProb seq_l = sequence_log_likelihood(kSix, i, s);
                if (seq_l.is_impossible())
                    continue;
                const double ratio_log = binomial_log_likelihood(kSix, i, s).log() - seq_l.log();
                const double ref = static_cast<double>(oracle::log_choose(s.n, s.x));
                if (std::fabs(std::expm1(ratio_log - ref)) > 1e-10)
                    c.fail(tag + ": binomial/sequence ratio " + box(i));
            }

            if (k < 50) {
                auto shuffled = draws;
                std::shuffle(shuffled.begin(), shuffled.end(), rng);
                const LogPosterior q = fold(shuffled);
                ++shuffles;
                for (std::size_t i = 0; i < kSix.boxes(); ++i)
                    if (std::fabs(q.probability(i) - p.probability(i)) > 1e-9 ||
                        q.is_excluded(i) != p.is_excluded(i))
                        c.fail(tag + ": shuffle changed " + box(i));
            }
        }
        const double s = std::chrono::duration<double>(Clock::now() - t0).count();
        c.expect(s < 10.0, "suite took " + Check::fmt(s) + " s");
        c.note(std::to_string(shuffles) + " shuffles, " + Check::fmt(s) + " s");
    });

    criterion("approximation convergence", [](Check& c) {
        const auto rows = approximation_report(kSix, 100);
        const double at100 = std::fabs(rows[100].posterior_deviation[1]);
        c.expect(at100 < 1e-9, "deviation at n=100 is " + Check::fmt(at100));
        for (std::size_t n = 11; n <= 100; ++n)
            c.expect(std::fabs(rows[n].posterior_deviation[1]) < std::fabs(rows[n - 1].posterior_deviation[1]),
                     "deviation not decreasing at n=" + std::to_string(n));
        c.note("|ratio-1| at n=100 " + Check::fmt(at100));
    });

    criterion("figure shape 1000 draws from B1", [](Check& c) {
        const auto seq = generate(kSix, 1, 1000, kSeed);
        const auto points = trajectory(seq, uniform_prior(kSix));
        const LogPosterior final_state = posterior_from_summary(uniform_prior(kSix), seq.summary());
        const auto margin = predictive_margin(final_state, 1);
        c.expect(margin.compare() == std::partial_ordering::greater, "predictive not strictly above 0.2");
        c.expect(points.back().predictive_white < 0.201, "predictive not below 0.201");
        c.expect(final_state.mode() == 1, "mode is " + box(final_state.mode()));
        c.note("x=" + std::to_string(seq.summary().x) + ", predictive-0.2 = exp(" + Check::fmt(margin.log_above) +
               ")");
    });

    criterion("service end-to-end over HTTP", [](Check& c) {
        SessionStore store(uniform_prior(kSix));
        boxinfer::testing::LiveServer server(store);
        auto http = server.client();
        const auto post = [&](const std::string& path, const std::string& body) {
            const auto r = http.Post(path, body, "application/json");
            if (!r)
                throw IoError("no response for " + path);
            return std::make_pair(r->status, nlohmann::json::parse(r->body));
        };
        auto [st, created] = post("/sessions", R"({"mode":"chosen-secret","box":1})");
        c.expect(st == 201, "create status " + std::to_string(st));
        const std::string id = created.at("id");
        for (int k = 0; k < 17; ++k)
            post("/sessions/" + id + "/observe", k < 16 ? R"({"color":"B"})" : R"({"color":"W"})");
        const auto state = http.Get("/sessions/" + id + "/state");
        const auto view = nlohmann::json::parse(state->body);
        c.abs(view.at("predictiveWhite").get<double>(), 0.203948, 1e-6, "predictive");
        c.expect(!view.contains("secretBox"), "secret leaked before reveal");
        const auto revealed = post("/sessions/" + id + "/reveal", "").second;
        c.expect(revealed.value("secretBox", -1) == 1, "secretBox " + revealed.value("secretBox", nlohmann::json()).dump());

        std::mt19937_64 rng(31337);
        for (int script = 0; script < 100; ++script) {
            const std::string sid = post("/sessions", R"({"mode":"no-secret"})").second.at("id");
            std::vector<Color> history;
            nlohmann::json last;
            const int steps = 1 + static_cast<int>(rng() % 40);
            for (int k = 0; k < steps; ++k) {
                if (!history.empty() && rng() % 3 == 0) {
                    last = post("/sessions/" + sid + "/undo", "").second;
                    history.pop_back();
                } else {
                    const Color col = rng() % 2 ? Color::White : Color::Black;
                    last = post("/sessions/" + sid + "/observe",
                                std::string(R"({"color":")") + to_letter(col) + "\"}")
                               .second;
                    history.push_back(col);
                }
            }
            const LogPosterior ref = fold(history);
            for (std::size_t i = 0; i < kSix.boxes(); ++i)
                if (std::fabs(last.at("posterior").at(i).get<double>() - ref.probability(i)) > 1e-12)
                    c.fail("script " + std::to_string(script) + ": " + box(i) + " differs from fold");
        }
        c.note("100 scripts");
    });

    std::printf("%s: %d criterion(s) failed\n", g_failed ? "FAIL" : "PASS", g_failed);
    return g_failed;
}
