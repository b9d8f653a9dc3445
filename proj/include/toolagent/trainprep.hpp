// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toolagent/core.hpp"
#include "toolagent/llm.hpp"

namespace toolagent {

// ---------------------------------------------------------------------------
// Weighted training masks
// ---------------------------------------------------------------------------

struct WeightedSample {
    std::string id;
    std::vector<std::string> tokens;
    std::vector<std::uint8_t> weights;  // parallel to tokens, each in {0, 1, 2}

    bool operator==(const WeightedSample&) const = default;
};

inline constexpr std::uint8_t weight_context = 0;
inline constexpr std::uint8_t weight_text = 1;
inline constexpr std::uint8_t weight_action = 2;

/// Tokens of every message content, in order. User, system and tool tokens
/// weigh 0, assistant tokens 1, and assistant tokens that overlap the ACTION
/// block weigh 2. Throws Error{malformed_action} when an assistant message
/// carries a request but its content has no parseable action block.
[[nodiscard]] WeightedSample weight_mask(const Conversation& conv);

[[nodiscard]] Json to_json(const WeightedSample& sample);
[[nodiscard]] WeightedSample weighted_sample_from_json(const Json& doc, const std::string& path = "$");

// ---------------------------------------------------------------------------
// Synthetic data generation
// ---------------------------------------------------------------------------

enum class InstanceType { common_api, model_api, api_oriented_qa, api_agnostic };

[[nodiscard]] std::string_view to_string(InstanceType type) noexcept;
[[nodiscard]] std::optional<InstanceType> instance_type_from_string(std::string_view text) noexcept;

enum class FilterReason { hallucinated_name, illegal_request, step_limit, backend_error };

[[nodiscard]] std::string_view to_string(FilterReason reason) noexcept;

struct Verdict {
    bool kept = true;
    FilterReason reason = FilterReason::hallucinated_name;  // meaningful only when !kept
    std::string detail;

    static Verdict keep() { return {}; }
    static Verdict filtered(FilterReason why, std::string detail) { return {false, why, std::move(detail)}; }
};

struct GenInstance {
    Conversation conversation;
    std::vector<ToolSchema> apis_offered;
    Verdict verdict;
    InstanceType type = InstanceType::common_api;
    std::string language = "en";
};

/// A catalog schema together with the instance type it is meant to exercise.
struct CatalogEntry {
    ToolSchema schema;
    InstanceType category = InstanceType::common_api;
};

[[nodiscard]] std::vector<CatalogEntry> catalog_from_json(const Json& doc);
[[nodiscard]] std::vector<CatalogEntry> load_catalog(const std::filesystem::path& path);

/// Scans assistant turns in order and records the first violation: a block
/// that fails to parse, a request without a block, or a missing required
/// argument is illegal_request; an API outside `apis` or an argument name
/// absent from its schema is hallucinated_name. Otherwise the instance is
/// kept. Verdicts set earlier for other reasons are preserved.
[[nodiscard]] GenInstance filter_instance(GenInstance inst, const std::vector<ToolSchema>& apis);

struct DatagenOptions {
    std::uint64_t seed = 0;
    std::size_t max_steps = 8;           // tool calls per user turn
    std::size_t max_user_turns = 1;
    std::size_t apis_per_instance = 3;
    std::size_t demos_per_prompt = 2;
    std::vector<std::string> demonstrations = default_demonstrations();
    std::vector<std::string> languages{"en", "zh"};

    static std::vector<std::string> default_demonstrations();
};

/// Runs the user / agent / API role loop n times. The user backend writes the
/// instruction from a prompt carrying seeded demonstrations, the offered APIs,
/// the declared type and language; the agent answers or emits ACTION blocks;
/// the API backend plays each called tool. Every instance is then filtered
/// against the APIs it was offered. Backend errors filter the instance
/// instead of propagating.
[[nodiscard]] std::vector<GenInstance> generate_instances(LlmBackend& user_llm, LlmBackend& agent_llm,
                                                          LlmBackend& api_sim,
                                                          const std::vector<CatalogEntry>& apis, std::size_t n,
                                                          const DatagenOptions& options = {});

/// Prompt markers shared with the rule-based simulators.
inline constexpr std::string_view type_marker = "Instance type: ";
inline constexpr std::string_view language_marker = "Language: ";
inline constexpr std::string_view api_marker = "API: ";
inline constexpr std::string_view request_marker = "Request: ";
inline constexpr std::string_view end_of_dialogue = "[END]";

struct DatasetStats {
    std::size_t instances = 0;
    std::size_t kept = 0;
    std::size_t filtered = 0;
    std::size_t user_turns = 0;  // over kept instances
    std::size_t tool_calls = 0;  // over kept instances
    double avg_turn = 0.0;
    double avg_step = 0.0;
    std::map<std::string, std::size_t> by_language;
    std::map<std::string, std::size_t> by_type;
    std::map<std::string, std::size_t> filtered_by_reason;
};

/// avg_turn is user turns per kept instance; avg_step is tool calls per user
/// turn, pooled over all kept user turns.
[[nodiscard]] DatasetStats dataset_stats(const std::vector<GenInstance>& instances);

[[nodiscard]] Json to_json(const DatasetStats& stats);
[[nodiscard]] Json to_json(const GenInstance& inst);
[[nodiscard]] GenInstance gen_instance_from_json(const Json& doc, const std::string& path = "$");

// ---------------------------------------------------------------------------
// Rule-based role players, so datagen and run work without a model server.
// ---------------------------------------------------------------------------

/// Writes an instruction aimed at the first API listed in the prompt.
class SimUserBackend final : public LlmBackend {
public:
    explicit SimUserBackend(LlmConfig config = {});

protected:
    std::string do_generate(std::string_view prompt) override;
};

/// Calls the first tool under "# TOOLS" with every required argument set to
/// the query, then answers once a tool turn closes the history.
class SimAgentBackend final : public LlmBackend {
public:
    explicit SimAgentBackend(LlmConfig config = {});

protected:
    std::string do_generate(std::string_view prompt) override;
};

/// Returns a small JSON success payload naming the called API.
class SimApiBackend final : public LlmBackend {
public:
    explicit SimApiBackend(LlmConfig config = {});

protected:
    std::string do_generate(std::string_view prompt) override;
};

} // namespace toolagent
