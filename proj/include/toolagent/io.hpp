// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "toolagent/core.hpp"

namespace toolagent {

[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written output.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

[[nodiscard]] Json read_json_file(const std::filesystem::path& path);

/// One JSON value per non-blank line. Errors name "file:line".
[[nodiscard]] std::vector<Json> read_jsonl(const std::filesystem::path& path);
[[nodiscard]] std::string to_jsonl(const std::vector<Json>& rows);

[[nodiscard]] std::vector<Conversation> read_conversations_jsonl(const std::filesystem::path& path);
[[nodiscard]] std::vector<ToolSchema> load_tool_manifest(const std::filesystem::path& path);
[[nodiscard]] std::vector<ToolSchema> tool_manifest_from_json(const Json& doc);

} // namespace toolagent
