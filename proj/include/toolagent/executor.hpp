// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "toolagent/action.hpp"
#include "toolagent/core.hpp"
#include "toolagent/llm.hpp"
#include "toolagent/memory.hpp"
#include "toolagent/toolkit.hpp"

namespace toolagent {

enum class Termination { final_answer, step_limit };

[[nodiscard]] std::string_view to_string(Termination t) noexcept;

struct AgentRunRecord {
    Conversation conversation;
    std::size_t steps_taken = 0;
    Termination terminated_by = Termination::final_answer;

    /// Content of the last assistant message, or empty.
    [[nodiscard]] std::string final_answer() const;

    bool operator==(const AgentRunRecord&) const = default;
};

[[nodiscard]] Json to_json(const AgentRunRecord& record);
[[nodiscard]] AgentRunRecord run_record_from_json(const Json& doc);

/// Name used for the tool turn that reports an unparseable action back to
/// the model.
inline constexpr std::string_view invalid_action_api = "invalid-action";

[[nodiscard]] std::string default_system_prompt();

struct AgentOptions {
    std::string system_prompt = default_system_prompt();
    std::vector<std::string> few_shot;
    std::size_t max_iterations = 5;
    std::size_t tool_top_k = 3;
    std::size_t knowledge_top_k = 3;
    bool use_tools = true;
    /// Re-rank tools against the latest tool output on every step instead of
    /// only against the user query.
    bool retrieve_tools_each_step = false;
    PromptPolicy prompt_policy;
    std::string conversation_id = "run";
};

/// retrieve -> build prompt -> generate -> parse -> execute, repeated until the
/// model answers or max_iterations steps have been spent. Holds references
/// only; the backend, registry and store must outlive the agent.
class Agent {
public:
    Agent(LlmBackend& llm, const ToolRegistry* tools, const KnowledgeStore* knowledge, AgentOptions options = {});

    /// Runs one user turn. When `prior` is given the new turn is appended to
    /// its conversation, so earlier turns stay in the prompt history.
    [[nodiscard]] AgentRunRecord run(std::string_view user_query, const Conversation* prior = nullptr) const;

    [[nodiscard]] const AgentOptions& options() const noexcept { return options_; }

private:
    LlmBackend& llm_;
    const ToolRegistry* tools_;
    const KnowledgeStore* knowledge_;
    AgentOptions options_;
};

} // namespace toolagent
