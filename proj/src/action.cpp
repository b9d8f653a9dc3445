// SPDX-License-Identifier: Apache-2.0
#include "toolagent/action.hpp"

namespace toolagent {

ActionParseError::ActionParseError(std::string message, std::size_t begin, std::size_t end, std::string span)
    : Error(Errc::malformed_action, std::move(message), "action[" + std::to_string(begin) + ".." +
                                                            std::to_string(end) + "]"),
      begin_(begin),
      end_(end),
      span_(std::move(span)) {}

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Offset of the marker on the first line that starts with it, or npos.
std::size_t find_action_line(std::string_view text) {
    std::size_t line = 0;
    while (line <= text.size()) {
        auto pos = line;
        while (pos < text.size() && is_blank(text[pos])) ++pos;
        if (text.substr(pos).starts_with(action_marker)) return pos;
        const auto nl = text.find('\n', line);
        if (nl == std::string_view::npos) break;
        line = nl + 1;
    }
    return std::string_view::npos;
}

// Index one past the brace closing the object that opens at `open`, or npos.
std::size_t match_object(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

} // namespace

AgentAction parse_action(std::string_view llm_output) {
    AgentAction action;
    action.raw = std::string(llm_output);

    const auto marker = find_action_line(llm_output);
    if (marker == std::string_view::npos) {
        action.kind = ActionKind::final_answer;
        action.answer = action.raw;
        return action;
    }

    auto fail = [&](std::string why, std::size_t end) -> ActionParseError {
        return ActionParseError(std::move(why), marker, end,
                                std::string(llm_output.substr(marker, end - marker)));
    };

    auto open = marker + action_marker.size();
    while (open < llm_output.size() && (is_blank(llm_output[open]) || llm_output[open] == '\n')) ++open;
    if (open >= llm_output.size() || llm_output[open] != '{') {
        throw fail("expected a JSON object after ACTION:", llm_output.size());
    }
    const auto close = match_object(llm_output, open);
    if (close == std::string_view::npos) throw fail("unterminated JSON object", llm_output.size());

    const auto body = llm_output.substr(open, close - open);
    Json doc = Json::parse(body.begin(), body.end(), nullptr, false);
    if (doc.is_discarded()) throw fail("invalid JSON in action block", close);
    if (!doc.is_object()) throw fail("action block must be a JSON object", close);

    auto name = doc.find("api_name");
    if (name == doc.end() || !name->is_string() || name->get<std::string>().empty()) {
        throw fail("action block needs a non-empty string api_name", close);
    }
    ApiRequest request;
    request.api_name = name->get<std::string>();
    if (auto params = doc.find("parameters"); params != doc.end() && !params->is_null()) {
        if (!params->is_object()) throw fail("parameters must be a JSON object", close);
        for (const auto& [k, v] : params->items()) request.arguments[k] = argument_value_string(v);
    }

    action.kind = ActionKind::tool_call;
    action.request = std::move(request);
    action.thought = std::string(trim(llm_output.substr(0, marker)));
    action.span_begin = marker;
    action.span_end = close;
    return action;
}

std::optional<AgentAction> try_parse_action(std::string_view llm_output) {
    try {
        return parse_action(llm_output);
    } catch (const ActionParseError&) {
        return std::nullopt;
    }
}

std::string format_action(const ApiRequest& request) {
    return std::string(action_marker) + " " + dump_compact(to_json(request));
}

} // namespace toolagent
