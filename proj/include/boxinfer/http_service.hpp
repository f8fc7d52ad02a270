#pragma once

// HTTP + JSON front end for SessionStore.
//
//   POST /sessions                {mode, box?, seed?}  -> 201 {id}
//   GET  /sessions/{id}/state                          -> StateView
//   POST /sessions/{id}/observe   {color: "B"|"W"}     -> StateView
//   POST /sessions/{id}/undo                           -> StateView
//   POST /sessions/{id}/reveal                         -> StateView
//   GET  /healthz                                      -> 200
//
// Errors are {error, message} with 400 (bad input), 404 (unknown id) or
// 409 (revealed session, undo on empty history).

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "boxinfer/report.hpp"
#include "boxinfer/session.hpp"

namespace boxinfer {

inline nlohmann::json state_view_json(const StateView& v) {
    auto history = nlohmann::json::array();
    for (Color c : v.history)
        history.push_back(to_int(c));
    nlohmann::json j = {
        {"mode", to_string(v.mode)},
        {"posterior", json_numbers(v.posterior)},
        {"excluded", v.excluded},
        {"predictiveWhite", json_number(v.predictive_white)},
        {"frequencyWhite", json_number(v.frequency_white)},
        {"misusedLaplaceWhite", json_number(v.laplace_white)},
        {"mostProbableBox", v.most_probable_box},
        {"oddsVsMostProbable", json_numbers(v.odds_vs_most_probable)},
        {"historyLength", v.history_length},
        {"historySummary", {{"n", v.history_summary.n}, {"x", v.history_summary.x}}},
        {"history", history},
        {"revealed", v.revealed},
    };
    if (v.revealed)
        j["secretBox"] = v.secret_box ? nlohmann::json(*v.secret_box) : nlohmann::json(nullptr);
    return j;
}

inline CreateRequest parse_create_request(const std::string& body) {
    CreateRequest req;
    if (body.empty())
        return req;
    const auto j = nlohmann::json::parse(body);
    if (!j.is_object())
        throw InvalidArgument("request body must be a JSON object");
    if (j.contains("mode"))
        req.mode = secret_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("box") && !j.at("box").is_null()) {
        if (!j.at("box").is_number_unsigned())
            throw InvalidArgument("box must be a non-negative integer");
        req.box = j.at("box").get<std::size_t>();
    }
    if (j.contains("seed") && !j.at("seed").is_null()) {
        const auto& s = j.at("seed");
        if (s.is_number_unsigned())
            req.seed = s.get<std::uint64_t>();
        else if (s.is_string())
            req.seed = std::stoull(s.get<std::string>());
        else
            throw InvalidArgument("seed must be a non-negative integer");
    }
    return req;
}

class LiveService {
public:
    explicit LiveService(SessionStore& store) : store_(store) {
        // SO_REUSEADDR only: the library default SO_REUSEPORT would let a
        // second server share an occupied port instead of failing.
        // The listening socket is remembered so a bound but never served
        // instance can release it.
        server_.set_socket_options([this](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
            listen_sock_ = sock;
        });
        install_routes();
    }

    ~LiveService() {
        if (port_ >= 0 && !served_)
            ::close(listen_sock_);
    }

    LiveService(const LiveService&) = delete;
    LiveService& operator=(const LiveService&) = delete;

    /// Serves files under `dir` at /. Returns false if the directory is missing.
    bool mount_static(const std::string& dir) { return server_.set_mount_point("/", dir); }

    /// Binds without serving yet; port 0 picks a free port. Throws IoError
    /// on bind failure.
    int bind(const std::string& host, int port) {
        const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
        if (bound < 0)
            throw IoError("cannot bind " + host + ":" + std::to_string(port));
        port_ = bound;
        return bound;
    }

    /// Blocks until stop(). Returns at once if stop() came first. A stop()
    /// racing with startup can be missed; callers that stop from another
    /// thread should repeat it until serve() returns.
    bool serve() {
        if (port_ < 0)
            throw IoError("serve() before bind()");
        served_ = true;
        if (stop_requested_)
            return true;
        return server_.listen_after_bind();
    }
    void stop() {
        stop_requested_ = true;
        server_.stop();
    }
    void wait_until_ready() { server_.wait_until_ready(); }
    int port() const { return port_; }

private:
    static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static void send_error(httplib::Response& res, int status, const std::string& code,
                           const std::string& message) {
        send_json(res, status, {{"error", code}, {"message", message}});
    }

    template <class Handler>
    static void guarded(httplib::Response& res, Handler&& h) {
        try {
            h();
        } catch (const SessionNotFound& e) {
            send_error(res, 404, "not_found", e.what());
        } catch (const SessionConflict& e) {
            send_error(res, 409, "conflict", e.what());
        } catch (const InvalidArgument& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const nlohmann::json::exception& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::invalid_argument& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::out_of_range& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    }

    void install_routes() {
        server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}});
        });

        server_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = store_.create(parse_create_request(req.body));
                send_json(res, 201, {{"id", id}});
            });
        });

        server_.Get(R"(/sessions/([^/]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, state_view_json(store_.state(req.matches[1]))); });
        });

        server_.Post(R"(/sessions/([^/]+)/observe)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                store_.find(id); // unknown id wins over a bad body
                const auto body = nlohmann::json::parse(req.body.empty() ? std::string("{}") : req.body);
                if (!body.is_object() || !body.contains("color") || !body.at("color").is_string())
                    throw InvalidArgument("body must be {\"color\": \"B\"|\"W\"}");
                const Color c = color_from_letter(body.at("color").get<std::string>());
                send_json(res, 200, state_view_json(store_.observe(id, c)));
            });
        });

        server_.Post(R"(/sessions/([^/]+)/undo)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, state_view_json(store_.undo(req.matches[1]))); });
        });

        server_.Post(R"(/sessions/([^/]+)/reveal)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, state_view_json(store_.reveal(req.matches[1]))); });
        });
    }

    SessionStore& store_;
    httplib::Server server_;
    int port_ = -1;
    socket_t listen_sock_ = INVALID_SOCKET;
    std::atomic<bool> served_{false};
    std::atomic<bool> stop_requested_{false};
};

} // namespace boxinfer
