// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "toolagent/core.hpp"

namespace toolagent {

inline constexpr std::string_view action_marker = "ACTION:";

enum class ActionKind { tool_call, final_answer };

/// What the controller decided in one generation. A tool call is a line that
/// starts with `ACTION:` followed by {"api_name": ..., "parameters": {...}};
/// anything else is a final answer.
struct AgentAction {
    ActionKind kind = ActionKind::final_answer;
    std::optional<ApiRequest> request;  // tool_call only
    std::string answer;                 // final_answer only
    std::string raw;                    // the verbatim model output
    std::string thought;                // prose before the action line, trimmed
    std::size_t span_begin = 0;         // byte range of "ACTION: {...}" in raw
    std::size_t span_end = 0;

    [[nodiscard]] bool is_tool_call() const noexcept { return kind == ActionKind::tool_call; }
};

class ActionParseError : public Error {
public:
    ActionParseError(std::string message, std::size_t begin, std::size_t end, std::string span);

    [[nodiscard]] std::size_t span_begin() const noexcept { return begin_; }
    [[nodiscard]] std::size_t span_end() const noexcept { return end_; }
    /// The offending text, from the marker to the end of what was scanned.
    [[nodiscard]] const std::string& span() const noexcept { return span_; }

private:
    std::size_t begin_;
    std::size_t end_;
    std::string span_;
};

/// Throws ActionParseError when an action line is present but its JSON is
/// unusable (truncated, invalid, not an object, missing api_name).
[[nodiscard]] AgentAction parse_action(std::string_view llm_output);

/// Non-throwing variant for callers that only need to classify text.
[[nodiscard]] std::optional<AgentAction> try_parse_action(std::string_view llm_output);

/// Canonical action text: `ACTION: {"api_name":...,"parameters":{...}}`.
[[nodiscard]] std::string format_action(const ApiRequest& request);

} // namespace toolagent
