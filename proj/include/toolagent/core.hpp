// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toolagent/error.hpp"

namespace toolagent {

using Json = nlohmann::ordered_json;

enum class Role { user, assistant, tool, system };

[[nodiscard]] std::string_view to_string(Role role) noexcept;
[[nodiscard]] std::optional<Role> role_from_string(std::string_view text) noexcept;

struct ToolParameter {
    std::string name;
    std::string description;
    bool required = false;

    bool operator==(const ToolParameter&) const = default;
};

/// Where a tool executes. Local tools dispatch to an in-process handler id;
/// remote tools POST their arguments to an http(s) URL.
struct Endpoint {
    enum class Kind { local, remote };

    Kind kind = Kind::local;
    std::string target;

    static Endpoint local(std::string handler) { return {Kind::local, std::move(handler)}; }
    static Endpoint remote(std::string url) { return {Kind::remote, std::move(url)}; }

    [[nodiscard]] bool is_remote() const noexcept { return kind == Kind::remote; }
    /// "local:<handler>" or the bare URL.
    [[nodiscard]] std::string to_string() const;
    static Endpoint parse(std::string_view text);

    bool operator==(const Endpoint&) const = default;
};

struct ToolSchema {
    std::string name;
    std::string description;
    std::vector<ToolParameter> parameters;
    Endpoint endpoint;

    [[nodiscard]] const ToolParameter* find_parameter(std::string_view param) const noexcept;

    bool operator==(const ToolSchema&) const = default;
};

/// Throws Error{invalid_schema} on empty name/description or duplicate
/// parameter names.
void validate(const ToolSchema& schema);

/// Argument values are kept as strings; the map is ordered so equality is
/// insensitive to the order arguments were written in.
using ArgumentMap = std::map<std::string, std::string, std::less<>>;

struct ApiRequest {
    std::string api_name;
    ArgumentMap arguments;

    bool operator==(const ApiRequest&) const = default;
};

enum class ResultStatus { success, error };

struct ApiResult {
    std::string api_name;
    ResultStatus status = ResultStatus::success;
    std::string payload;

    [[nodiscard]] bool ok() const noexcept { return status == ResultStatus::success; }

    static ApiResult success(std::string api, std::string payload) {
        return {std::move(api), ResultStatus::success, std::move(payload)};
    }
    static ApiResult failure(std::string api, std::string cause) {
        return {std::move(api), ResultStatus::error, std::move(cause)};
    }

    bool operator==(const ApiResult&) const = default;
};

struct Message {
    Role role = Role::user;
    std::string content;
    std::optional<ApiRequest> request;
    std::optional<ApiResult> result;

    static Message user(std::string text) { return {Role::user, std::move(text), {}, {}}; }
    static Message system(std::string text) { return {Role::system, std::move(text), {}, {}}; }
    static Message assistant(std::string text, std::optional<ApiRequest> req = {}) {
        return {Role::assistant, std::move(text), std::move(req), {}};
    }
    static Message tool(ApiResult res) {
        auto text = res.payload;
        return {Role::tool, std::move(text), {}, std::move(res)};
    }

    bool operator==(const Message&) const = default;
};

struct Conversation {
    std::string id;
    std::vector<Message> messages;

    bool operator==(const Conversation&) const = default;
};

/// Throws Error{invariant_violation} whose where() is "messages[i]".
void validate(const Conversation& conv);

// JSON shapes shared by every module. from_json throws Error{malformed_document}
// with the JSON path of the offending field.
[[nodiscard]] Json to_json(const ToolParameter& param);
[[nodiscard]] Json to_json(const ToolSchema& schema);
[[nodiscard]] Json to_json(const ApiRequest& request);
[[nodiscard]] Json to_json(const ApiResult& result);
[[nodiscard]] Json to_json(const Message& message);
[[nodiscard]] Json to_json(const Conversation& conv);

[[nodiscard]] ToolSchema tool_schema_from_json(const Json& doc, const std::string& path = "$");
[[nodiscard]] ApiRequest api_request_from_json(const Json& doc, const std::string& path = "$");
[[nodiscard]] ApiResult api_result_from_json(const Json& doc, const std::string& path = "$");
[[nodiscard]] Message message_from_json(const Json& doc, const std::string& path = "$");
[[nodiscard]] Conversation conversation_from_json(const Json& doc, const std::string& path = "$");

/// Converts a JSON argument value to its stored string form: strings verbatim,
/// everything else as compact JSON.
[[nodiscard]] std::string argument_value_string(const Json& value);

/// Compact UTF-8 JSON; invalid UTF-8 is replaced rather than thrown on.
[[nodiscard]] std::string dump_compact(const Json& doc);

[[nodiscard]] std::string serialize_conversation(const Conversation& conv);
[[nodiscard]] Conversation parse_conversation(std::string_view doc);

} // namespace toolagent
