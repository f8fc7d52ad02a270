#pragma once

// Command-line front end. Every subcommand is deterministic given its flags
// and input files; data goes to files or `out`, diagnostics to `err`.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>

#include "boxinfer/analysis.hpp"
#include "boxinfer/gaussian.hpp"
#include "boxinfer/http_service.hpp"
#include "boxinfer/posterior.hpp"
#include "boxinfer/report.hpp"
#include "boxinfer/sequence.hpp"
#include "boxinfer/sequence_io.hpp"
#include "boxinfer/session.hpp"

namespace boxinfer::cli {

inline constexpr std::uint64_t kDefaultSeed = 20160715;

struct Config {
    unsigned m = BoxModel::kDefaultBalls;
    std::uint64_t seed = kDefaultSeed;
    std::size_t run_length = kDefaultRunLength;
    std::string format = "csv";
    std::string prior = "uniform";

    Format output_format() const { return format == "json" ? Format::Json : Format::Csv; }
};

/// "uniform" or a comma-separated list of m+1 non-negative weights.
inline LogPosterior parse_prior(const std::string& text, const BoxModel& model) {
    if (text.empty() || text == "uniform")
        return uniform_prior(model);
    std::vector<double> weights;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double w = 0.0;
        try {
            w = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw InvalidArgument("prior weight '" + item + "' is not a number");
        weights.push_back(w);
    }
    return LogPosterior::from_weights(model, weights);
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw IoError("cannot open '" + path.string() + "' for writing");
    return f;
}

/// Trajectory and final-state files for one slice of a sequence.
inline std::vector<std::string> write_part(const std::filesystem::path& dir, const std::string& name,
                                           const ObservationSequence& seq, const LogPosterior& prior,
                                           Format fmt) {
    const auto points = trajectory(seq, prior);
    const LogPosterior final_state = posterior_from_summary(prior, seq.summary());
    std::vector<std::string> written;
    if (fmt == Format::Csv) {
        const auto traj = dir / (name + "_trajectory.csv");
        const auto summ = dir / (name + "_summary.csv");
        const auto odds = dir / (name + "_odds.csv");
        auto t = open_out(traj);
        write_trajectory_csv(t, points, prior.model());
        auto s = open_out(summ);
        write_summary_csv(s, final_state, seq.summary());
        auto o = open_out(odds);
        write_odds_csv(o, odds_table(seq.summary(), prior.model()));
        written = {traj.string(), summ.string(), odds.string()};
    } else {
        const auto traj = dir / (name + "_trajectory.json");
        const auto summ = dir / (name + "_summary.json");
        open_out(traj) << trajectory_json(points).dump(1) << '\n';
        open_out(summ) << summary_json(final_state, seq.summary()).dump(1) << '\n';
        written = {traj.string(), summ.string()};
    }
    return written;
}

/// Serves until SIGINT/SIGTERM. The signals are blocked and picked up by a
/// waiter thread, so stop() never runs inside a signal handler.
inline void serve_until_signal(LiveService& service) {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);
    std::atomic<bool> done{false};
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        // Repeat: a stop issued while the listener is still starting is lost.
        while (!done) {
            service.stop();
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
    });
    service.serve();
    done = true;
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Sequential Bayesian inference for the six-box experiment", "boxinfer"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Optional TOML/INI config file; command-line flags win");

    Config cfg;
    app.add_option("-m,--balls", cfg.m, "Balls per box; the model has m+1 boxes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "Generator seed (env BOXINFER_SEED)")
        ->envname("BOXINFER_SEED")
        ->capture_default_str();
    app.add_option("--run-length", cfg.run_length, "Draws per analysis run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--prior", cfg.prior, "'uniform' or comma-separated weights for B0..Bm")
        ->capture_default_str();

    // generate
    auto* gen = app.add_subcommand("generate", "Draw a sequence from one box and write it (one 0/1 per line)");
    std::size_t gen_box = 0, gen_n = 1000;
    std::string gen_out;
    gen->add_option("--box", gen_box, "Box index 0..m")->required();
    gen->add_option("-n,--draws", gen_n, "Number of draws")->capture_default_str();
    gen->add_option("-o,--out", gen_out, "Output sequence file")->required();

    // analyze
    auto* ana = app.add_subcommand("analyze", "Trajectories and final-state reports for a sequence file, whole and per run");
    std::string ana_in, ana_dir;
    ana->add_option("-i,--in", ana_in, "Sequence file")->required();
    ana->add_option("-d,--out-dir", ana_dir, "Directory for report files")->required();

    // replay
    auto* rep = app.add_subcommand("replay", "Print the trajectory of a sequence file");
    std::string rep_in;
    rep->add_option("-i,--in", rep_in, "Sequence file")->required();

    // anatomy / odds
    std::uint64_t an_n = 0, an_x = 0;
    auto* anat = app.add_subcommand("anatomy", "Posterior, binomial and sequence likelihood per box for a summary (n, x)");
    anat->add_option("n", an_n, "Draws")->required();
    anat->add_option("x", an_x, "White draws")->required();
    auto* odds = app.add_subcommand("odds", "Pairwise Bayes-Turing factors for a summary (n, x)");
    odds->add_option("n", an_n, "Draws")->required();
    odds->add_option("x", an_x, "White draws")->required();

    // approx
    auto* approx = app.add_subcommand("approx", "Exact vs closed-form values after n Blacks in a row, n = 0..max-n");
    std::uint64_t approx_max = 100;
    approx->add_option("--max-n", approx_max, "Largest n")->check(CLI::PositiveNumber)->capture_default_str();

    // gaussian
    auto* gauss = app.add_subcommand("gaussian", "Probability of a standard normal draw rounding to VALUE at DECIMALS places");
    double g_value = 0.0;
    int g_decimals = 12;
    gauss->add_option("value", g_value, "Rounded value")->required();
    gauss->add_option("decimals", g_decimals, "Decimal places")->capture_default_str();

    // serve
    auto* serve = app.add_subcommand("serve", "Run the live hidden-box game HTTP service");
    int port = 8080;
    std::string host = "127.0.0.1", static_dir, journal;
    serve->add_option("-p,--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--static-dir", static_dir, "Serve built web UI assets from this directory at /");
    serve->add_option("--journal", journal, "Append-only session journal; replayed at startup");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        const BoxModel model(cfg.m);
        const Format fmt = cfg.output_format();

        if (*gen) {
            write_sequence(generate(model, gen_box, gen_n, cfg.seed), gen_out);
            return 0;
        }
        if (*ana) {
            const LogPosterior prior = parse_prior(cfg.prior, model);
            const ObservationSequence seq = read_sequence(ana_in);
            std::filesystem::create_directories(ana_dir);
            std::vector<std::string> written = detail::write_part(ana_dir, "full", seq, prior, fmt);
            const auto parts = split_runs(seq, cfg.run_length);
            for (std::size_t r = 0; r < parts.runs.size(); ++r) {
                char name[32];
                std::snprintf(name, sizeof name, "run_%03zu", r + 1);
                const auto w = detail::write_part(ana_dir, name, parts.runs[r], prior, fmt);
                written.insert(written.end(), w.begin(), w.end());
            }
            for (const auto& w : written)
                out << w << '\n';
            return 0;
        }
        if (*rep) {
            const LogPosterior prior = parse_prior(cfg.prior, model);
            const auto points = trajectory(read_sequence(rep_in), prior);
            if (fmt == Format::Csv)
                write_trajectory_csv(out, points, model);
            else
                out << trajectory_json(points).dump(1) << '\n';
            return 0;
        }
        if (*anat) {
            const auto a = anatomy(SequenceSummary(an_n, an_x), model, parse_prior(cfg.prior, model));
            if (fmt == Format::Csv)
                write_anatomy_csv(out, a, model);
            else
                out << anatomy_json(a, model).dump(1) << '\n';
            return 0;
        }
        if (*odds) {
            const auto t = odds_table(SequenceSummary(an_n, an_x), model);
            if (fmt == Format::Csv)
                write_odds_csv(out, t);
            else
                out << odds_json(t).dump(1) << '\n';
            return 0;
        }
        if (*approx) {
            const auto rows = approximation_report(model, approx_max);
            if (fmt == Format::Csv)
                write_approximation_csv(out, rows, model);
            else
                out << approximation_json(rows).dump(1) << '\n';
            return 0;
        }
        if (*gauss) {
            const double p = gaussian_tiny_chance(g_value, g_decimals);
            if (fmt == Format::Csv)
                out << "value,decimals,probability\n"
                    << csv_number(g_value) << ',' << g_decimals << ',' << csv_number(p) << '\n';
            else
                out << nlohmann::json{{"value", json_number(g_value)},
                                      {"decimals", g_decimals},
                                      {"probability", json_number(p)}}
                           .dump(1)
                    << '\n';
            return 0;
        }
        if (*serve) {
            SessionStore store(parse_prior(cfg.prior, model),
                               journal.empty() ? std::nullopt : std::optional<std::string>(journal));
            LiveService service(store);
            if (!static_dir.empty() && !service.mount_static(static_dir))
                throw IoError("static directory '" + static_dir + "' does not exist");
            const int bound = service.bind(host, port);
            err << "boxinfer: serving on http://" << host << ':' << bound << '\n';
            detail::serve_until_signal(service);
            return 0;
        }
    } catch (const ParseError& e) {
        err << "boxinfer: parse error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "boxinfer: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace boxinfer::cli
