// SPDX-License-Identifier: Apache-2.0
#include "toolagent/core.hpp"

#include <set>

namespace toolagent {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::malformed_document: return "malformed_document";
        case Errc::invariant_violation: return "invariant_violation";
        case Errc::invalid_schema: return "invalid_schema";
        case Errc::invalid_config: return "invalid_config";
        case Errc::duplicate_id: return "duplicate_id";
        case Errc::empty_input: return "empty_input";
        case Errc::empty_index: return "empty_index";
        case Errc::script_exhausted: return "script_exhausted";
        case Errc::context_overflow: return "context_overflow";
        case Errc::transport: return "transport";
        case Errc::malformed_action: return "malformed_action";
        case Errc::id_mismatch: return "id_mismatch";
        case Errc::battle_state: return "battle_state";
        case Errc::not_found: return "not_found";
        case Errc::io: return "io";
    }
    return "unknown";
}

Error::Error(Errc code, std::string message, std::string where)
    : std::runtime_error(where.empty() ? message : where + ": " + message),
      code_(code),
      where_(std::move(where)) {}

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::user: return "user";
        case Role::assistant: return "assistant";
        case Role::tool: return "tool";
        case Role::system: return "system";
    }
    return "user";
}

std::optional<Role> role_from_string(std::string_view text) noexcept {
    if (text == "user") return Role::user;
    if (text == "assistant") return Role::assistant;
    if (text == "tool") return Role::tool;
    if (text == "system") return Role::system;
    return std::nullopt;
}

std::string Endpoint::to_string() const {
    if (kind == Kind::remote) return target;
    return "local:" + target;
}

Endpoint Endpoint::parse(std::string_view text) {
    if (text.starts_with("http://") || text.starts_with("https://")) {
        return remote(std::string(text));
    }
    if (text.starts_with("local:")) text.remove_prefix(6);
    return local(std::string(text));
}

const ToolParameter* ToolSchema::find_parameter(std::string_view param) const noexcept {
    for (const auto& p : parameters) {
        if (p.name == param) return &p;
    }
    return nullptr;
}

void validate(const ToolSchema& schema) {
    if (schema.name.empty()) {
        throw Error(Errc::invalid_schema, "tool name is empty");
    }
    if (schema.description.empty()) {
        throw Error(Errc::invalid_schema, "tool description is empty", schema.name);
    }
    std::set<std::string_view> seen;
    for (const auto& p : schema.parameters) {
        if (p.name.empty()) {
            throw Error(Errc::invalid_schema, "parameter with empty name", schema.name);
        }
        if (!seen.insert(p.name).second) {
            throw Error(Errc::invalid_schema, "duplicate parameter '" + p.name + "'", schema.name);
        }
    }
}

void validate(const Conversation& conv) {
    bool seen_non_system = false;
    std::optional<Role> previous;
    for (std::size_t i = 0; i < conv.messages.size(); ++i) {
        const auto& m = conv.messages[i];
        const auto where = "messages[" + std::to_string(i) + "]";
        if (m.request && m.role != Role::assistant) {
            throw Error(Errc::invariant_violation, "request on a non-assistant message", where);
        }
        if (m.result && m.role != Role::tool) {
            throw Error(Errc::invariant_violation, "result on a non-tool message", where);
        }
        if (m.request && m.request->api_name.empty()) {
            throw Error(Errc::invariant_violation, "request with empty api_name", where);
        }
        if (!seen_non_system && m.role != Role::system) {
            if (m.role != Role::user) {
                throw Error(Errc::invariant_violation, "first non-system message must be a user turn", where);
            }
            seen_non_system = true;
        }
        if (previous == Role::user && m.role == Role::user) {
            throw Error(Errc::invariant_violation, "two consecutive user messages", where);
        }
        previous = m.role;
    }
}

std::string dump_compact(const Json& doc) {
    return doc.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::string argument_value_string(const Json& value) {
    if (value.is_string()) return value.get<std::string>();
    return dump_compact(value);
}

Json to_json(const ToolParameter& param) {
    return Json{{"name", param.name}, {"description", param.description}, {"required", param.required}};
}

Json to_json(const ToolSchema& schema) {
    Json params = Json::array();
    for (const auto& p : schema.parameters) params.push_back(to_json(p));
    return Json{{"name", schema.name},
                {"description", schema.description},
                {"parameters", std::move(params)},
                {"endpoint", schema.endpoint.to_string()}};
}

Json to_json(const ApiRequest& request) {
    Json args = Json::object();
    for (const auto& [k, v] : request.arguments) args[k] = v;
    return Json{{"api_name", request.api_name}, {"parameters", std::move(args)}};
}

Json to_json(const ApiResult& result) {
    return Json{{"api_name", result.api_name},
                {"status", result.ok() ? "success" : "error"},
                {"payload", result.payload}};
}

Json to_json(const Message& message) {
    Json doc{{"role", to_string(message.role)}, {"content", message.content}};
    if (message.request) doc["request"] = to_json(*message.request);
    if (message.result) doc["result"] = to_json(*message.result);
    return doc;
}

Json to_json(const Conversation& conv) {
    Json messages = Json::array();
    for (const auto& m : conv.messages) messages.push_back(to_json(m));
    return Json{{"id", conv.id}, {"messages", std::move(messages)}};
}

namespace {

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
    throw Error(Errc::malformed_document, what, path);
}

const Json& require(const Json& doc, const char* key, const std::string& path) {
    if (!doc.is_object()) malformed(path, "expected an object");
    auto it = doc.find(key);
    if (it == doc.end()) malformed(path + "." + key, "missing field");
    return *it;
}

std::string require_string(const Json& doc, const char* key, const std::string& path) {
    const auto& v = require(doc, key, path);
    if (!v.is_string()) malformed(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string optional_string(const Json& doc, const char* key, const std::string& path) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return {};
    if (!it->is_string()) malformed(path + "." + key, "expected a string");
    return it->get<std::string>();
}

} // namespace

ToolSchema tool_schema_from_json(const Json& doc, const std::string& path) {
    ToolSchema schema;
    schema.name = require_string(doc, "name", path);
    schema.description = require_string(doc, "description", path);
    if (auto it = doc.find("parameters"); it != doc.end()) {
        if (!it->is_array()) malformed(path + ".parameters", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto p_path = path + ".parameters[" + std::to_string(i) + "]";
            const auto& p = (*it)[i];
            ToolParameter param;
            param.name = require_string(p, "name", p_path);
            param.description = optional_string(p, "description", p_path);
            if (auto r = p.find("required"); r != p.end()) {
                if (!r->is_boolean()) malformed(p_path + ".required", "expected a boolean");
                param.required = r->get<bool>();
            }
            schema.parameters.push_back(std::move(param));
        }
    }
    auto endpoint = optional_string(doc, "endpoint", path);
    schema.endpoint = endpoint.empty() ? Endpoint::local(schema.name) : Endpoint::parse(endpoint);
    if (!schema.endpoint.is_remote() && schema.endpoint.target.empty()) {
        schema.endpoint.target = schema.name;
    }
    return schema;
}

ApiRequest api_request_from_json(const Json& doc, const std::string& path) {
    ApiRequest request;
    request.api_name = require_string(doc, "api_name", path);
    if (auto it = doc.find("parameters"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) malformed(path + ".parameters", "expected an object");
        for (const auto& [k, v] : it->items()) request.arguments[k] = argument_value_string(v);
    }
    return request;
}

ApiResult api_result_from_json(const Json& doc, const std::string& path) {
    ApiResult result;
    result.api_name = require_string(doc, "api_name", path);
    const auto status = require_string(doc, "status", path);
    if (status == "success") {
        result.status = ResultStatus::success;
    } else if (status == "error") {
        result.status = ResultStatus::error;
    } else {
        malformed(path + ".status", "expected \"success\" or \"error\"");
    }
    result.payload = optional_string(doc, "payload", path);
    return result;
}

Message message_from_json(const Json& doc, const std::string& path) {
    Message message;
    const auto role = require_string(doc, "role", path);
    auto parsed = role_from_string(role);
    if (!parsed) malformed(path + ".role", "unknown role '" + role + "'");
    message.role = *parsed;
    message.content = optional_string(doc, "content", path);
    if (auto it = doc.find("request"); it != doc.end() && !it->is_null()) {
        message.request = api_request_from_json(*it, path + ".request");
    }
    if (auto it = doc.find("result"); it != doc.end() && !it->is_null()) {
        message.result = api_result_from_json(*it, path + ".result");
    }
    return message;
}

Conversation conversation_from_json(const Json& doc, const std::string& path) {
    Conversation conv;
    conv.id = require_string(doc, "id", path);
    const auto& messages = require(doc, "messages", path);
    if (!messages.is_array()) malformed(path + ".messages", "expected an array");
    conv.messages.reserve(messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) {
        conv.messages.push_back(message_from_json(messages[i], path + ".messages[" + std::to_string(i) + "]"));
    }
    return conv;
}

std::string serialize_conversation(const Conversation& conv) {
    return dump_compact(to_json(conv));
}

Conversation parse_conversation(std::string_view doc) {
    Json parsed = Json::parse(doc.begin(), doc.end(), nullptr, false);
    if (parsed.is_discarded()) {
        throw Error(Errc::malformed_document, "not a valid JSON document", "$");
    }
    auto conv = conversation_from_json(parsed);
    validate(conv);
    return conv;
}

} // namespace toolagent
