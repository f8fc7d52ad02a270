#pragma once

// Hidden-box game sessions: the server keeps a secret box, a human reports
// each drawn color, and the session answers with the updated beliefs.
//
// Journal format (plain text, one event per line, append-only):
//   boxinfer-journal v1 m=<m>
//   create <id> <random-secret|chosen-secret|no-secret> <secret box or -> <created ms since epoch>
//   observe <id> <B|W>
//   undo <id>
//   reveal <id>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "boxinfer/errors.hpp"
#include "boxinfer/posterior.hpp"
#include "boxinfer/sequence.hpp"

namespace boxinfer {

class SessionNotFound : public Error {
public:
    explicit SessionNotFound(const std::string& id) : Error("unknown session '" + id + "'") {}
};

/// The request is valid but the session's state forbids it (revealed
/// session, undo with no history).
class SessionConflict : public Error {
public:
    using Error::Error;
};

enum class SecretMode { RandomSecret, ChosenSecret, NoSecret };

inline std::string to_string(SecretMode m) {
    switch (m) {
    case SecretMode::RandomSecret: return "random-secret";
    case SecretMode::ChosenSecret: return "chosen-secret";
    case SecretMode::NoSecret: return "no-secret";
    }
    return "?";
}

inline SecretMode secret_mode_from_string(const std::string& s) {
    if (s == "random-secret") return SecretMode::RandomSecret;
    if (s == "chosen-secret") return SecretMode::ChosenSecret;
    if (s == "no-secret") return SecretMode::NoSecret;
    throw InvalidArgument("unknown session mode '" + s +
                          "' (expected random-secret, chosen-secret or no-secret)");
}

inline Color color_from_letter(const std::string& s) {
    if (s == "B" || s == "b" || s == "0") return Color::Black;
    if (s == "W" || s == "w" || s == "1") return Color::White;
    throw InvalidArgument("invalid color '" + s + "' (expected \"B\" or \"W\")");
}

struct CreateRequest {
    SecretMode mode = SecretMode::RandomSecret;
    std::optional<std::size_t> box;     // chosen-secret only
    std::optional<std::uint64_t> seed;  // random-secret only
};

/// What a player may see. `secret_box` is only ever set after reveal.
struct StateView {
    SecretMode mode = SecretMode::NoSecret;
    std::vector<double> posterior;
    std::vector<bool> excluded;
    double predictive_white = 0.0;
    std::optional<double> frequency_white;
    double laplace_white = 0.5;
    std::size_t most_probable_box = 0;
    /// P(B_i) / P(B_mode), in [0, 1]; 0 for excluded boxes.
    std::vector<double> odds_vs_most_probable;
    std::size_t history_length = 0;
    SequenceSummary history_summary;
    std::vector<Color> history;
    bool revealed = false;
    std::optional<std::size_t> secret_box;
};

inline StateView make_view(SecretMode mode, const LogPosterior& beliefs,
                           const ObservationSequence& history, bool revealed,
                           std::optional<std::size_t> secret) {
    StateView v;
    v.mode = mode;
    v.posterior = beliefs.probabilities();
    for (std::size_t i = 0; i < beliefs.size(); ++i)
        v.excluded.push_back(beliefs.is_excluded(i));
    const SequenceSummary s = history.summary();
    v.predictive_white = predictive_white(beliefs);
    v.frequency_white = frequency_estimate(s);
    v.laplace_white = laplace_rule(s);
    v.most_probable_box = beliefs.mode();
    const double top = beliefs.log_weight(v.most_probable_box).log();
    for (std::size_t i = 0; i < beliefs.size(); ++i)
        v.odds_vs_most_probable.push_back(
            beliefs.is_excluded(i) ? 0.0 : std::exp(beliefs.log_weight(i).log() - top));
    v.history_length = history.size();
    v.history_summary = s;
    v.history.assign(history.draws().begin(), history.draws().end());
    v.revealed = revealed;
    if (revealed)
        v.secret_box = secret;
    return v;
}

class GameSession {
public:
    using Clock = std::chrono::system_clock;

    GameSession(std::string id, LogPosterior prior, SecretMode mode,
                std::optional<std::size_t> secret, Clock::time_point created = Clock::now())
        : id_(std::move(id)),
          mode_(mode),
          secret_(secret),
          created_(created),
          prior_(prior),
          beliefs_(std::move(prior)) {}

    const std::string& id() const { return id_; }
    SecretMode mode() const { return mode_; }
    Clock::time_point created_at() const { return created_; }

    StateView state() const {
        std::lock_guard lock(mu_);
        return view_locked();
    }

    /// `on_commit` runs under the session lock once the change is accepted,
    /// so journal order matches the order changes were applied.
    template <class OnCommit = void (*)()>
    StateView observe(Color c, OnCommit on_commit = [] {}) {
        std::lock_guard lock(mu_);
        if (revealed_)
            throw SessionConflict("session '" + id_ + "' has been revealed; no more draws");
        LogPosterior next = posterior_update(beliefs_, c);
        history_.push_back(c);
        beliefs_ = std::move(next);
        on_commit();
        return view_locked();
    }

    template <class OnCommit = void (*)()>
    StateView undo(OnCommit on_commit = [] {}) {
        std::lock_guard lock(mu_);
        if (revealed_)
            throw SessionConflict("session '" + id_ + "' has been revealed");
        if (history_.empty())
            throw SessionConflict("nothing to undo in session '" + id_ + "'");
        history_.pop_back();
        beliefs_ = refold();
        on_commit();
        return view_locked();
    }

    template <class OnCommit = void (*)()>
    StateView reveal(OnCommit on_commit = [] {}) {
        std::lock_guard lock(mu_);
        if (!revealed_) {
            revealed_ = true;
            on_commit();
        }
        return view_locked();
    }

    /// Server-side only; never part of a pre-reveal view.
    std::optional<std::size_t> secret_box() const { return secret_; }

    LogPosterior beliefs() const {
        std::lock_guard lock(mu_);
        return beliefs_;
    }

    ObservationSequence history() const {
        std::lock_guard lock(mu_);
        return history_;
    }

private:
    LogPosterior refold() const {
        LogPosterior b = prior_;
        for (Color c : history_.draws())
            b = posterior_update(b, c);
        return b;
    }

    StateView view_locked() const { return make_view(mode_, beliefs_, history_, revealed_, secret_); }

    const std::string id_;
    const SecretMode mode_;
    const std::optional<std::size_t> secret_;
    const Clock::time_point created_;
    const LogPosterior prior_;

    mutable std::mutex mu_;
    LogPosterior beliefs_;
    ObservationSequence history_;
    bool revealed_ = false;
};

/// 128-bit hex token from the OS entropy source.
inline std::string random_session_token() {
    std::random_device rd;
    std::ostringstream os;
    os << std::hex;
    for (int i = 0; i < 4; ++i) {
        os.width(8);
        os.fill('0');
        os << static_cast<std::uint32_t>(rd());
    }
    return os.str();
}

class SessionStore {
public:
    /// With a journal path, existing events are replayed first and new ones
    /// appended.
    explicit SessionStore(LogPosterior prior, std::optional<std::string> journal_path = std::nullopt)
        : prior_(std::move(prior)), journal_path_(std::move(journal_path)) {
        if (journal_path_)
            open_journal();
    }

    const BoxModel& model() const { return prior_.model(); }

    std::string create(const CreateRequest& req) {
        const BoxModel& m = model();
        std::optional<std::size_t> secret;
        switch (req.mode) {
        case SecretMode::ChosenSecret:
            if (!req.box)
                throw InvalidArgument("chosen-secret mode needs a box index");
            m.check_box(*req.box);
            secret = req.box;
            break;
        case SecretMode::RandomSecret: {
            std::mt19937_64 engine(req.seed ? *req.seed : (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}());
            secret = static_cast<std::size_t>(engine() % m.boxes());
            break;
        }
        case SecretMode::NoSecret:
            if (req.box)
                throw InvalidArgument("no-secret mode takes no box");
            break;
        }
        std::string id = random_session_token();
        const auto created = GameSession::Clock::now();
        std::unique_lock lock(map_mu_);
        auto session = std::make_shared<GameSession>(id, prior_, req.mode, secret, created);
        sessions_.emplace(id, session);
        journal("create " + id + ' ' + to_string(req.mode) + ' ' +
                (secret ? std::to_string(*secret) : std::string("-")) + ' ' +
                std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(
                                   created.time_since_epoch())
                                   .count()));
        return id;
    }

    std::shared_ptr<GameSession> find(const std::string& id) const {
        std::shared_lock lock(map_mu_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end())
            throw SessionNotFound(id);
        return it->second;
    }

    StateView state(const std::string& id) const { return find(id)->state(); }

    StateView observe(const std::string& id, Color c) {
        return find(id)->observe(c, [&] { journal("observe " + id + ' ' + to_letter(c)); });
    }

    StateView undo(const std::string& id) {
        return find(id)->undo([&] { journal("undo " + id); });
    }

    StateView reveal(const std::string& id) {
        return find(id)->reveal([&] { journal("reveal " + id); });
    }

    std::size_t size() const {
        std::shared_lock lock(map_mu_);
        return sessions_.size();
    }

private:
    void journal(const std::string& line) {
        if (!journal_)
            return;
        std::lock_guard lock(journal_mu_);
        *journal_ << line << '\n';
        journal_->flush();
        if (!*journal_)
            throw IoError("cannot append to journal '" + *journal_path_ + "'");
    }

    void open_journal() {
        const std::string header = "boxinfer-journal v1 m=" + std::to_string(model().balls());
        bool fresh = true;
        if (std::ifstream in{*journal_path_}) {
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                if (line.empty())
                    continue;
                if (line_no == 1) {
                    if (line != header)
                        throw ParseError(ParseError::Kind::BadHeader, *journal_path_, 1,
                                         "expected journal header '" + header + "'");
                    fresh = false;
                    continue;
                }
                replay(line, line_no);
            }
            if (line_no > 0 && fresh)
                throw ParseError(ParseError::Kind::BadHeader, *journal_path_, 1, "missing journal header");
        }
        journal_.emplace(*journal_path_, std::ios::app);
        if (!*journal_)
            throw IoError("cannot open journal '" + *journal_path_ + "' for appending");
        if (fresh)
            journal(header);
    }

    void replay(const std::string& line, std::size_t line_no) {
        std::istringstream in(line);
        std::string verb, id;
        in >> verb >> id;
        const auto bad = [&](const std::string& why) {
            return ParseError(ParseError::Kind::MalformedToken, *journal_path_, line_no, why);
        };
        try {
            if (verb == "create") {
                std::string mode, secret;
                long long created_ms = 0;
                if (!(in >> mode >> secret >> created_ms))
                    throw bad("truncated create event");
                std::optional<std::size_t> box;
                if (secret != "-") {
                    box = std::stoul(secret);
                    model().check_box(*box);
                }
                const GameSession::Clock::time_point created{std::chrono::milliseconds(created_ms)};
                sessions_[id] = std::make_shared<GameSession>(id, prior_, secret_mode_from_string(mode),
                                                              box, created);
            } else if (verb == "observe") {
                std::string c;
                in >> c;
                find(id)->observe(color_from_letter(c));
            } else if (verb == "undo") {
                find(id)->undo();
            } else if (verb == "reveal") {
                find(id)->reveal();
            } else {
                throw bad("unknown journal event '" + verb + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw bad(e.what());
        }
    }

    const LogPosterior prior_;
    std::optional<std::string> journal_path_;
    std::optional<std::ofstream> journal_;
    std::mutex journal_mu_;
    mutable std::shared_mutex map_mu_;
    std::map<std::string, std::shared_ptr<GameSession>> sessions_;
};

} // namespace boxinfer
