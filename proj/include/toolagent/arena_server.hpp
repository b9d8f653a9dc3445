// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "toolagent/arena.hpp"

namespace toolagent {

/// JSON view of a battle. Agent identities are included only once the
/// battle has been decided.
[[nodiscard]] Json battle_view(const Battle& battle);

/// HTTP front end for an Arena:
///   POST /api/battles             {instruction}
///   GET  /api/battles/{id}
///   POST /api/battles/{id}/vote   {outcome: "a" | "b" | "tie"}
///   GET  /api/leaderboard
///   GET  /api/agents
///   POST /api/chat                {session_id?, message, agent?}
/// Errors are {"error": {"code", "message"}} with status 400, 404 or 409.
class ArenaServer {
public:
    explicit ArenaServer(Arena& arena, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~ArenaServer();

    ArenaServer(const ArenaServer&) = delete;
    ArenaServer& operator=(const ArenaServer&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it, or -1.
    int bind_to_any_port(const std::string& host);
    /// Serves on a port obtained from bind_to_any_port(); blocks until stop().
    bool listen_after_bind();
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace toolagent
