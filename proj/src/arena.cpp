// SPDX-License-Identifier: Apache-2.0
#include "toolagent/arena.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "toolagent/io.hpp"
#include "toolagent/trainprep.hpp"

namespace toolagent {

std::string_view to_string(Outcome outcome) noexcept {
    switch (outcome) {
    case Outcome::pending: return "pending";
    case Outcome::a_wins: return "a_wins";
    case Outcome::b_wins: return "b_wins";
    case Outcome::tie: return "tie";
    }
    return "pending";
}

std::optional<Outcome> outcome_from_string(std::string_view text) noexcept {
    if (text == "a" || text == "a_wins") return Outcome::a_wins;
    if (text == "b" || text == "b_wins") return Outcome::b_wins;
    if (text == "tie") return Outcome::tie;
    if (text == "pending") return Outcome::pending;
    return std::nullopt;
}

double elo_expected(double ra, double rb) noexcept {
    return 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0));
}

double RatingTable::rating(std::string_view agent) const {
    auto it = ratings.find(agent);
    return it == ratings.end() ? config.initial : it->second;
}

double RatingTable::rating_sum() const {
    double sum = 0.0;
    for (const auto& [_, r] : ratings) sum += r;
    return sum;
}

void record_result(RatingTable& table, const std::string& a, const std::string& b, Outcome outcome) {
    if (outcome == Outcome::pending) throw Error(Errc::battle_state, "cannot record a pending outcome");
    if (a == b) throw Error(Errc::invariant_violation, "an agent cannot play itself", a);
    auto& ra = table.ratings.try_emplace(a, table.config.initial).first->second;
    auto& rb = table.ratings.try_emplace(b, table.config.initial).first->second;
    const double score_a = outcome == Outcome::a_wins ? 1.0 : outcome == Outcome::b_wins ? 0.0 : 0.5;
    const double delta = table.config.k * (score_a - elo_expected(ra, rb));
    ra += delta;
    rb -= delta;
    ++table.games[a];
    ++table.games[b];
}

std::vector<LeaderboardRow> leaderboard(const RatingTable& table) {
    std::vector<LeaderboardRow> rows;
    rows.reserve(table.ratings.size());
    for (const auto& [id, r] : table.ratings) {
        auto g = table.games.find(id);
        rows.push_back({id, r, g == table.games.end() ? 0 : g->second});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
        if (x.rating != y.rating) return x.rating > y.rating;
        return x.agent_id < y.agent_id;
    });
    return rows;
}

Json to_json(const RatingTable& table) {
    Json ratings = Json::object();
    for (const auto& [id, r] : table.ratings) ratings[id] = r;
    Json games = Json::object();
    for (const auto& [id, g] : table.games) games[id] = g;
    return Json{{"k", table.config.k},
                {"initial", table.config.initial},
                {"ratings", std::move(ratings)},
                {"games", std::move(games)}};
}

RatingTable rating_table_from_json(const Json& doc) {
    if (!doc.is_object()) throw Error(Errc::malformed_document, "expected an object", "$");
    RatingTable table;
    table.config.k = doc.value("k", table.config.k);
    table.config.initial = doc.value("initial", table.config.initial);
    if (auto it = doc.find("ratings"); it != doc.end()) {
        if (!it->is_object()) throw Error(Errc::malformed_document, "expected an object", "$.ratings");
        for (const auto& [id, r] : it->items()) {
            if (!r.is_number()) throw Error(Errc::malformed_document, "expected a number", "$.ratings." + id);
            table.ratings[id] = r.get<double>();
        }
    }
    if (auto it = doc.find("games"); it != doc.end()) {
        if (!it->is_object()) throw Error(Errc::malformed_document, "expected an object", "$.games");
        for (const auto& [id, g] : it->items()) {
            if (!g.is_number_unsigned()) throw Error(Errc::malformed_document, "expected a count", "$.games." + id);
            table.games[id] = g.get<std::size_t>();
        }
    }
    return table;
}

Json to_json(const std::vector<LeaderboardRow>& rows) {
    Json out = Json::array();
    for (const auto& row : rows) {
        out.push_back(Json{{"agent_id", row.agent_id}, {"rating", row.rating}, {"games", row.games}});
    }
    return out;
}

void record_battle(RatingTable& table, Battle& battle, Outcome outcome) {
    if (battle.outcome != Outcome::pending) {
        throw Error(Errc::battle_state, "battle was already decided", battle.battle_id);
    }
    record_result(table, battle.agent_a, battle.agent_b, outcome);
    battle.outcome = outcome;
}

Json to_json(const BattleLogEntry& entry) {
    return Json{{"battle_id", entry.battle_id},
                {"agent_a", entry.agent_a},
                {"agent_b", entry.agent_b},
                {"outcome", to_string(entry.outcome)}};
}

BattleLogEntry battle_log_entry_from_json(const Json& doc, const std::string& path) {
    if (!doc.is_object()) throw Error(Errc::malformed_document, "expected an object", path);
    auto field = [&](const char* name) {
        auto it = doc.find(name);
        if (it == doc.end() || !it->is_string()) {
            throw Error(Errc::malformed_document, "expected a string", path + "." + name);
        }
        return it->get<std::string>();
    };
    BattleLogEntry entry;
    entry.battle_id = field("battle_id");
    entry.agent_a = field("agent_a");
    entry.agent_b = field("agent_b");
    const auto outcome = outcome_from_string(field("outcome"));
    if (!outcome || *outcome == Outcome::pending) {
        throw Error(Errc::malformed_document, "expected a decided outcome", path + ".outcome");
    }
    entry.outcome = *outcome;
    return entry;
}

BattleLog::BattleLog(std::filesystem::path path) : path_(std::move(path)) {}

void BattleLog::append(const BattleLogEntry& entry) {
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot open battle log", path_.string());
    out << dump_compact(to_json(entry)) << '\n';
    out.flush();
    if (!out) throw Error(Errc::io, "cannot append to battle log", path_.string());
}

std::vector<BattleLogEntry> BattleLog::entries() const {
    std::vector<BattleLogEntry> out;
    if (!std::filesystem::exists(path_)) return out;
    const auto rows = read_jsonl(path_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.push_back(battle_log_entry_from_json(rows[i], path_.string() + ":" + std::to_string(i + 1)));
    }
    return out;
}

RatingTable replay(const std::vector<BattleLogEntry>& entries, const EloConfig& config) {
    RatingTable table;
    table.config = config;
    for (const auto& e : entries) record_result(table, e.agent_a, e.agent_b, e.outcome);
    return table;
}

std::unique_ptr<LlmBackend> load_backend(std::string_view spec, const std::filesystem::path& base_dir,
                                         LlmConfig config) {
    if (spec == "sim" || spec == "sim-agent") return std::make_unique<SimAgentBackend>(std::move(config));
    if (spec == "sim-user") return std::make_unique<SimUserBackend>(std::move(config));
    if (spec == "sim-api") return std::make_unique<SimApiBackend>(std::move(config));
    if (spec.starts_with("scripted:")) {
        std::filesystem::path file(std::string(spec.substr(9)));
        if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
        return ScriptedBackend::from_file(file, std::move(config));
    }
    return make_backend(spec, std::move(config));
}

std::vector<ArenaAgent> agent_pool_from_json(const Json& doc, const std::filesystem::path& base_dir) {
    const Json* list = &doc;
    std::string base = "$";
    if (doc.is_object()) {
        auto it = doc.find("agents");
        if (it == doc.end()) throw Error(Errc::malformed_document, "missing field", "$.agents");
        list = &*it;
        base = "$.agents";
    }
    if (!list->is_array()) throw Error(Errc::malformed_document, "expected an array", base);
    std::vector<ArenaAgent> pool;
    for (std::size_t i = 0; i < list->size(); ++i) {
        const auto path = base + "[" + std::to_string(i) + "]";
        const auto& item = (*list)[i];
        if (!item.is_object()) throw Error(Errc::malformed_document, "expected an object", path);
        ArenaAgent agent;
        agent.id = item.value("id", std::string{});
        if (agent.id.empty()) throw Error(Errc::malformed_document, "expected a non-empty id", path + ".id");
        for (const auto& other : pool) {
            if (other.id == agent.id) throw Error(Errc::duplicate_id, "duplicate agent id '" + agent.id + "'", path);
        }
        agent.backend_spec = item.value("backend", std::string("sim"));
        LlmConfig config;
        if (auto llm = item.find("llm"); llm != item.end()) config = llm_config_from_json(*llm);
        agent.backend = load_backend(agent.backend_spec, base_dir, std::move(config));
        agent.options.conversation_id = agent.id;
        if (auto it = item.find("system_prompt"); it != item.end()) agent.options.system_prompt = it->get<std::string>();
        agent.options.max_iterations = item.value("max_iterations", agent.options.max_iterations);
        agent.options.use_tools = item.value("use_tools", agent.options.use_tools);
        pool.push_back(std::move(agent));
    }
    return pool;
}

std::vector<ArenaAgent> load_agent_pool(const std::filesystem::path& path) {
    return agent_pool_from_json(read_json_file(path), path.parent_path());
}

Arena::Arena(std::vector<ArenaAgent> pool, const ToolRegistry* tools, const KnowledgeStore* knowledge,
             ArenaOptions options)
    : pool_(std::move(pool)), tools_(tools), knowledge_(knowledge), options_(std::move(options)),
      rng_(options_.seed) {
    if (pool_.size() < 2) throw Error(Errc::invalid_config, "the arena needs at least two agents");
    table_.config = options_.elo;
    if (options_.log_path) {
        log_.emplace(*options_.log_path);
        const auto entries = log_->entries();
        table_ = replay(entries, options_.elo);
        for (const auto& e : entries) {
            // Keep new ids clear of logged ones.
            const auto dash = e.battle_id.rfind('-');
            if (dash == std::string::npos) continue;
            try {
                next_battle_ = std::max<std::size_t>(next_battle_, std::stoull(e.battle_id.substr(dash + 1)) + 1);
            } catch (const std::exception&) {
            }
        }
    }
}

std::pair<std::size_t, std::size_t> Arena::sample_pair() {
    std::unique_lock lock(mutex_);
    const auto n = pool_.size();
    const auto i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    auto j = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng_);
    if (j >= i) ++j;
    return {i, j};
}

void Arena::run_agent(const ArenaAgent& agent, std::string_view instruction, const std::string& battle_id,
                      AgentRunRecord& trace, std::string& error) const {
    auto options = agent.options;
    options.conversation_id = battle_id;
    if (tools_ == nullptr || tools_->empty()) options.use_tools = false;
    try {
        trace = Agent(*agent.backend, tools_, knowledge_, options).run(instruction);
    } catch (const std::exception& e) {
        error = e.what();
        trace.conversation.id = battle_id;
    }
}

Battle Arena::start_battle(std::string_view instruction) {
    if (instruction.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw Error(Errc::empty_input, "instruction is empty");
    }
    const auto [i, j] = sample_pair();
    Battle battle;
    {
        std::unique_lock lock(mutex_);
        battle.battle_id = "battle-" + std::to_string(next_battle_++);
    }
    battle.agent_a = pool_[i].id;
    battle.agent_b = pool_[j].id;
    battle.instruction = std::string(instruction);
    run_agent(pool_[i], instruction, battle.battle_id, battle.trace_a, battle.error_a);
    run_agent(pool_[j], instruction, battle.battle_id, battle.trace_b, battle.error_b);

    std::unique_lock lock(mutex_);
    battles_.emplace(battle.battle_id, battle);
    return battle;
}

VoteResult Arena::vote(std::string_view battle_id, Outcome outcome) {
    if (outcome == Outcome::pending) throw Error(Errc::invalid_config, "a vote must be a, b or tie");
    std::unique_lock lock(mutex_);
    auto it = battles_.find(battle_id);
    if (it == battles_.end()) throw Error(Errc::not_found, "unknown battle", std::string(battle_id));
    auto& battle = it->second;
    if (battle.outcome != Outcome::pending) {
        throw Error(Errc::battle_state, "battle was already decided", battle.battle_id);
    }
    // Log first: if the append fails the vote is not counted.
    if (log_) log_->append({battle.battle_id, battle.agent_a, battle.agent_b, outcome});
    record_battle(table_, battle, outcome);
    if (options_.snapshot_path) write_file_atomic(*options_.snapshot_path, to_json(table_).dump(2) + "\n");
    return {battle, table_.rating(battle.agent_a), table_.rating(battle.agent_b)};
}

std::optional<Battle> Arena::battle(std::string_view battle_id) const {
    std::shared_lock lock(mutex_);
    auto it = battles_.find(battle_id);
    if (it == battles_.end()) return std::nullopt;
    return it->second;
}

std::vector<LeaderboardRow> Arena::leaderboard() const {
    std::shared_lock lock(mutex_);
    return toolagent::leaderboard(table_);
}

RatingTable Arena::table() const {
    std::shared_lock lock(mutex_);
    return table_;
}

std::vector<std::string> Arena::agent_ids() const {
    std::vector<std::string> ids;
    for (const auto& a : pool_) ids.push_back(a.id);
    return ids;
}

std::string Arena::backend_spec(std::string_view agent_id) const { return agent(agent_id).backend_spec; }

const ArenaAgent& Arena::agent(std::string_view id) const {
    for (const auto& a : pool_) {
        if (a.id == id) return a;
    }
    throw Error(Errc::not_found, "unknown agent", std::string(id));
}

AgentRunRecord Arena::chat(const std::string& session_id, std::string_view message, std::string_view agent_id) {
    const auto& who = agent_id.empty() ? pool_.front() : agent(agent_id);
    std::optional<Conversation> prior;
    {
        std::shared_lock lock(mutex_);
        if (auto it = sessions_.find(session_id); it != sessions_.end()) prior = it->second;
    }
    auto options = who.options;
    options.conversation_id = session_id;
    if (tools_ == nullptr || tools_->empty()) options.use_tools = false;
    auto record = Agent(*who.backend, tools_, knowledge_, options).run(message, prior ? &*prior : nullptr);
    std::unique_lock lock(mutex_);
    sessions_[session_id] = record.conversation;
    return record;
}

} // namespace toolagent
