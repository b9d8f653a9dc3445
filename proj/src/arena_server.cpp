// SPDX-License-Identifier: Apache-2.0
#include "toolagent/arena_server.hpp"

#include <atomic>

#include <httplib.h>

namespace toolagent {

namespace {

Json trace_view(const AgentRunRecord& trace, const std::string& error) {
    Json messages = Json::array();
    for (const auto& m : trace.conversation.messages) messages.push_back(to_json(m));
    Json view{{"messages", std::move(messages)},
              {"steps_taken", trace.steps_taken},
              {"terminated_by", to_string(trace.terminated_by)}};
    if (!error.empty()) view["error"] = error;
    return view;
}

std::string response_text(const AgentRunRecord& trace, const std::string& error) {
    return error.empty() ? trace.final_answer() : "[agent error] " + error;
}

int status_for(Errc code) {
    switch (code) {
    case Errc::not_found: return 404;
    case Errc::battle_state: return 409;
    case Errc::transport:
    case Errc::io:
    case Errc::script_exhausted: return 500;
    default: return 400;
    }
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, status, Json{{"error", {{"code", code}, {"message", message}}}});
}

Json parse_body(const httplib::Request& req) {
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw Error(Errc::malformed_document, "request body must be a JSON object", "$");
    }
    return body;
}

std::string string_field(const Json& body, const char* name, bool required) {
    auto it = body.find(name);
    if (it == body.end() || it->is_null()) {
        if (required) throw Error(Errc::malformed_document, "missing field", std::string("$.") + name);
        return {};
    }
    if (!it->is_string()) throw Error(Errc::malformed_document, "expected a string", std::string("$.") + name);
    return it->get<std::string>();
}

} // namespace

Json battle_view(const Battle& battle) {
    Json view{{"battle_id", battle.battle_id},
              {"instruction", battle.instruction},
              {"outcome", to_string(battle.outcome)},
              {"response_a", response_text(battle.trace_a, battle.error_a)},
              {"response_b", response_text(battle.trace_b, battle.error_b)},
              {"trace_a", trace_view(battle.trace_a, battle.error_a)},
              {"trace_b", trace_view(battle.trace_b, battle.error_b)}};
    if (battle.outcome != Outcome::pending) view["revealed"] = Json{{"a", battle.agent_a}, {"b", battle.agent_b}};
    return view;
}

struct ArenaServer::Impl {
    Arena& arena;
    httplib::Server server;
    std::atomic<std::size_t> next_session{1};

    explicit Impl(Arena& a) : arena(a) {}

    // Runs a handler, mapping domain errors onto HTTP statuses.
    template <class F>
    void guarded(httplib::Response& res, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            send_error(res, status_for(e.code()), errc_name(e.code()), e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    }

    void install_routes() {
        server.Post("/api/battles", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = parse_body(req);
                const auto instruction = string_field(body, "instruction", true);
                send_json(res, 200, battle_view(arena.start_battle(instruction)));
            });
        });

        server.Get(R"(/api/battles/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto battle = arena.battle(req.matches[1].str());
                if (!battle) throw Error(Errc::not_found, "unknown battle", req.matches[1].str());
                send_json(res, 200, battle_view(*battle));
            });
        });

        server.Post(R"(/api/battles/([^/]+)/vote)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = parse_body(req);
                const auto text = string_field(body, "outcome", true);
                const auto outcome = outcome_from_string(text);
                if (!outcome || *outcome == Outcome::pending) {
                    throw Error(Errc::malformed_document, "outcome must be \"a\", \"b\" or \"tie\"", "$.outcome");
                }
                const auto result = arena.vote(req.matches[1].str(), *outcome);
                Json ratings = Json::object();
                ratings[result.battle.agent_a] = result.rating_a;
                ratings[result.battle.agent_b] = result.rating_b;
                send_json(res, 200,
                          Json{{"battle_id", result.battle.battle_id},
                               {"outcome", to_string(result.battle.outcome)},
                               {"revealed", {{"a", result.battle.agent_a}, {"b", result.battle.agent_b}}},
                               {"new_ratings", std::move(ratings)}});
            });
        });

        server.Get("/api/leaderboard", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, to_json(arena.leaderboard())); });
        });

        server.Get("/api/agents", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] {
                Json agents = Json::array();
                for (const auto& id : arena.agent_ids()) {
                    agents.push_back(Json{{"id", id}, {"backend", arena.backend_spec(id)}});
                }
                send_json(res, 200, agents);
            });
        });

        server.Post("/api/chat", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = parse_body(req);
                const auto message = string_field(body, "message", true);
                if (message.find_first_not_of(" \t\r\n") == std::string::npos) {
                    throw Error(Errc::empty_input, "message is empty", "$.message");
                }
                auto session = string_field(body, "session_id", false);
                if (session.empty()) session = "session-" + std::to_string(next_session++);
                const auto agent_id = string_field(body, "agent", false);
                const auto record = arena.chat(session, message, agent_id);
                send_json(res, 200,
                          Json{{"session_id", session},
                               {"reply", record.final_answer()},
                               {"trace", trace_view(record, {})}});
            });
        });
    }
};

ArenaServer::ArenaServer(Arena& arena, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(arena)) {
    impl_->install_routes();
    if (static_dir && !impl_->server.set_mount_point("/", static_dir->string())) {
        throw Error(Errc::invalid_config, "static directory does not exist", static_dir->string());
    }
}

ArenaServer::~ArenaServer() { stop(); }

bool ArenaServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int ArenaServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool ArenaServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ArenaServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ArenaServer::stop() {
    if (impl_) impl_->server.stop();
}

} // namespace toolagent
