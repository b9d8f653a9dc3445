// SPDX-License-Identifier: Apache-2.0
#include "toolagent/action.hpp"
#include "toolagent/memory.hpp"
#include "toolagent/trainprep.hpp"

namespace toolagent {

namespace {

LlmConfig named(LlmConfig config, std::string_view name) {
    if (config.model_name == LlmConfig{}.model_name) config.model_name = std::string(name);
    return config;
}

// Rest of the first line that starts with `marker`, or empty.
std::string_view line_after(std::string_view text, std::string_view marker) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (line.starts_with(marker)) return line.substr(marker.size());
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return {};
}

Json parse_or_null(std::string_view text) {
    Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
    return doc.is_discarded() ? Json() : doc;
}

} // namespace

SimUserBackend::SimUserBackend(LlmConfig config) : LlmBackend(named(std::move(config), "sim-user")) {}

std::string SimUserBackend::do_generate(std::string_view prompt) {
    if (prompt.find("\n# DIALOGUE\n") != std::string_view::npos) return std::string(end_of_dialogue);

    const auto type = instance_type_from_string(line_after(prompt, type_marker)).value_or(InstanceType::common_api);
    const bool zh = line_after(prompt, language_marker) == "zh";
    const auto api = parse_or_null(line_after(prompt, api_marker));
    const auto description = api.is_object() ? api.value("description", std::string{}) : std::string{};

    switch (type) {
    case InstanceType::api_agnostic:
        return zh ? "给我讲一个关于天气的有趣事实。" : "Tell me an interesting fact about the weather.";
    case InstanceType::api_oriented_qa:
        return zh ? "哪个API可以用来做这件事：" + description : "Which API can do this: " + description;
    default:
        return zh ? "请帮我完成这个任务：" + description : "Please help me with this task: " + description;
    }
}

SimAgentBackend::SimAgentBackend(LlmConfig config) : LlmBackend(named(std::move(config), "sim-agent")) {}

std::string SimAgentBackend::do_generate(std::string_view prompt) {
    const auto split = prompt.rfind("\n\n");
    const auto query = split == std::string_view::npos ? prompt : prompt.substr(split + 2);

    // Role of the newest history entry.
    std::string_view last_role;
    std::string_view last_line;
    if (const auto history = prompt.find(history_header); history != std::string_view::npos) {
        const auto body_end = split == std::string_view::npos || split < history ? prompt.size() : split;
        std::size_t best = std::string_view::npos;
        for (std::string_view role : {"user", "assistant", "tool", "system"}) {
            const auto needle = "\n" + std::string(role) + ": ";
            const auto pos = prompt.substr(0, body_end).rfind(needle);
            if (pos != std::string_view::npos && pos >= history && (best == std::string_view::npos || pos > best)) {
                best = pos;
                last_role = role;
            }
        }
        if (best != std::string_view::npos) {
            const auto start = best + 1 + last_role.size() + 2;
            const auto nl = prompt.find('\n', start);
            last_line = prompt.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        }
    }
    if (last_role == "tool") return "Here is the result: " + std::string(last_line);

    const auto tools_pos = prompt.find(std::string(tools_header) + "\n");
    if (tools_pos == std::string_view::npos) return "Answering directly: " + std::string(query);
    const auto first_tool = prompt.substr(tools_pos + tools_header.size() + 1);
    const auto schema = parse_or_null(first_tool.substr(0, first_tool.find('\n')));
    if (!schema.is_object() || !schema.contains("name")) return "Answering directly: " + std::string(query);

    ApiRequest request;
    request.api_name = schema["name"].get<std::string>();
    for (const auto& p : schema.value("parameters", Json::array())) {
        if (p.value("required", false)) request.arguments[p.value("name", std::string{})] = std::string(query);
    }
    return "I will call " + request.api_name + ".\n" + format_action(request);
}

SimApiBackend::SimApiBackend(LlmConfig config) : LlmBackend(named(std::move(config), "sim-api")) {}

std::string SimApiBackend::do_generate(std::string_view prompt) {
    const auto request = parse_or_null(line_after(prompt, request_marker));
    const auto name = request.is_object() ? request.value("api_name", std::string("unknown")) : std::string("unknown");
    return dump_compact(Json{{"status", "ok"}, {"api_name", name}, {"result", "simulated output of " + name}});
}

} // namespace toolagent
