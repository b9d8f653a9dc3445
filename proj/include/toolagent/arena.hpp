// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toolagent/executor.hpp"

namespace toolagent {

// ---------------------------------------------------------------------------
// Elo ratings
// ---------------------------------------------------------------------------

struct EloConfig {
    double k = 32.0;
    double initial = 1000.0;

    bool operator==(const EloConfig&) const = default;
};

enum class Outcome { pending, a_wins, b_wins, tie };

[[nodiscard]] std::string_view to_string(Outcome outcome) noexcept;
/// Accepts the log names (a_wins, b_wins, tie, pending) and the vote names
/// (a, b, tie).
[[nodiscard]] std::optional<Outcome> outcome_from_string(std::string_view text) noexcept;

/// Expected score of a player rated `ra` against one rated `rb`.
[[nodiscard]] double elo_expected(double ra, double rb) noexcept;

struct RatingTable {
    EloConfig config;
    std::map<std::string, double, std::less<>> ratings;
    std::map<std::string, std::size_t, std::less<>> games;

    [[nodiscard]] double rating(std::string_view agent) const;
    [[nodiscard]] double rating_sum() const;

    bool operator==(const RatingTable&) const = default;
};

/// Applies one decided game. b receives exactly the negation of a's change,
/// so the rating sum is preserved up to rounding. Throws on a pending outcome
/// or a self-match.
void record_result(RatingTable& table, const std::string& a, const std::string& b, Outcome outcome);

struct LeaderboardRow {
    std::string agent_id;
    double rating = 0.0;
    std::size_t games = 0;
};

/// Rating descending, agent id ascending on ties.
[[nodiscard]] std::vector<LeaderboardRow> leaderboard(const RatingTable& table);

[[nodiscard]] Json to_json(const RatingTable& table);
[[nodiscard]] RatingTable rating_table_from_json(const Json& doc);
[[nodiscard]] Json to_json(const std::vector<LeaderboardRow>& rows);

// ---------------------------------------------------------------------------
// Battles and their log
// ---------------------------------------------------------------------------

struct Battle {
    std::string battle_id;
    std::string agent_a;
    std::string agent_b;
    std::string instruction;
    AgentRunRecord trace_a;
    AgentRunRecord trace_b;
    std::string error_a;  // non-empty when the run failed
    std::string error_b;
    Outcome outcome = Outcome::pending;
};

/// Settles a pending battle and updates the table. Throws Error{battle_state}
/// when the battle was already decided.
void record_battle(RatingTable& table, Battle& battle, Outcome outcome);

struct BattleLogEntry {
    std::string battle_id;
    std::string agent_a;
    std::string agent_b;
    Outcome outcome = Outcome::tie;
};

[[nodiscard]] Json to_json(const BattleLogEntry& entry);
[[nodiscard]] BattleLogEntry battle_log_entry_from_json(const Json& doc, const std::string& path = "$");

/// Append-only JSONL file of decided battles. The log is the source of truth
/// for ratings; replay() rebuilds the table from it.
class BattleLog {
public:
    explicit BattleLog(std::filesystem::path path);

    void append(const BattleLogEntry& entry);
    [[nodiscard]] std::vector<BattleLogEntry> entries() const;
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

[[nodiscard]] RatingTable replay(const std::vector<BattleLogEntry>& entries, const EloConfig& config = {});

// ---------------------------------------------------------------------------
// Arena
// ---------------------------------------------------------------------------

/// Backend from "sim", "scripted:<file>" or "http:<url>". Relative script
/// paths resolve against `base_dir`.
[[nodiscard]] std::unique_ptr<LlmBackend> load_backend(std::string_view spec,
                                                       const std::filesystem::path& base_dir = {},
                                                       LlmConfig config = {});

struct ArenaAgent {
    std::string id;
    std::string backend_spec;
    std::unique_ptr<LlmBackend> backend;
    AgentOptions options;
};

/// Reads {"agents": [{"id", "backend", "system_prompt"?, "max_iterations"?,
/// "use_tools"?}]}; a bare array is accepted too.
[[nodiscard]] std::vector<ArenaAgent> agent_pool_from_json(const Json& doc, const std::filesystem::path& base_dir);
[[nodiscard]] std::vector<ArenaAgent> load_agent_pool(const std::filesystem::path& path);

struct ArenaOptions {
    EloConfig elo;
    std::uint64_t seed = std::random_device{}();
    std::optional<std::filesystem::path> log_path;       // replayed on start
    std::optional<std::filesystem::path> snapshot_path;  // rewritten after each vote
};

struct VoteResult {
    Battle battle;
    double rating_a = 0.0;
    double rating_b = 0.0;
};

/// Thread-safe battle service. Agent runs happen outside the lock; votes and
/// rating updates are serialized, reads see the latest committed table.
class Arena {
public:
    Arena(std::vector<ArenaAgent> pool, const ToolRegistry* tools, const KnowledgeStore* knowledge,
          ArenaOptions options = {});

    /// Two distinct pool indices, uniformly at random.
    [[nodiscard]] std::pair<std::size_t, std::size_t> sample_pair();

    [[nodiscard]] Battle start_battle(std::string_view instruction);
    [[nodiscard]] VoteResult vote(std::string_view battle_id, Outcome outcome);
    [[nodiscard]] std::optional<Battle> battle(std::string_view battle_id) const;

    [[nodiscard]] std::vector<LeaderboardRow> leaderboard() const;
    [[nodiscard]] RatingTable table() const;
    [[nodiscard]] std::vector<std::string> agent_ids() const;
    [[nodiscard]] std::string backend_spec(std::string_view agent_id) const;

    /// One chat turn against a pool agent (the first one when `agent_id` is
    /// empty). Sessions keep their conversation between calls.
    [[nodiscard]] AgentRunRecord chat(const std::string& session_id, std::string_view message,
                                      std::string_view agent_id = {});

private:
    [[nodiscard]] const ArenaAgent& agent(std::string_view id) const;
    void run_agent(const ArenaAgent& agent, std::string_view instruction, const std::string& battle_id,
                   AgentRunRecord& trace, std::string& error) const;

    std::vector<ArenaAgent> pool_;
    const ToolRegistry* tools_;
    const KnowledgeStore* knowledge_;
    ArenaOptions options_;
    std::optional<BattleLog> log_;

    mutable std::shared_mutex mutex_;
    std::mt19937_64 rng_;
    RatingTable table_;
    std::map<std::string, Battle, std::less<>> battles_;
    std::size_t next_battle_ = 1;
    std::map<std::string, Conversation, std::less<>> sessions_;
};

} // namespace toolagent
