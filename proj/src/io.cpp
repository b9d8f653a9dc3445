// SPDX-License-Identifier: Apache-2.0
#include "toolagent/io.hpp"

#include <fstream>
#include <sstream>

namespace toolagent {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open for reading", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::io, "cannot open for writing", tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error(Errc::io, "write failed", tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(Errc::io, "rename failed", path.string());
    }
}

Json read_json_file(const fs::path& path) {
    auto text = read_file(path);
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(Errc::malformed_document, "not a valid JSON document", path.string());
    return doc;
}

std::vector<Json> read_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open for reading", path.string());
    std::vector<Json> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json doc = Json::parse(line, nullptr, false);
        if (doc.is_discarded()) {
            throw Error(Errc::malformed_document, "not a valid JSON line",
                        path.string() + ":" + std::to_string(lineno));
        }
        rows.push_back(std::move(doc));
    }
    return rows;
}

std::string to_jsonl(const std::vector<Json>& rows) {
    std::string out;
    for (const auto& row : rows) {
        out += dump_compact(row);
        out += '\n';
    }
    return out;
}

std::vector<Conversation> read_conversations_jsonl(const fs::path& path) {
    auto rows = read_jsonl(path);
    std::vector<Conversation> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto where = path.string() + "[" + std::to_string(i) + "]";
        try {
            auto conv = conversation_from_json(rows[i]);
            validate(conv);
            out.push_back(std::move(conv));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), where);
        }
    }
    return out;
}

std::vector<ToolSchema> tool_manifest_from_json(const Json& doc) {
    if (!doc.is_array()) throw Error(Errc::malformed_document, "tool manifest must be a JSON array", "$");
    std::vector<ToolSchema> tools;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        auto schema = tool_schema_from_json(doc[i], "$[" + std::to_string(i) + "]");
        validate(schema);
        tools.push_back(std::move(schema));
    }
    return tools;
}

std::vector<ToolSchema> load_tool_manifest(const fs::path& path) {
    try {
        return tool_manifest_from_json(read_json_file(path));
    } catch (const Error& e) {
        if (e.code() == Errc::io) throw;
        throw Error(e.code(), e.what(), path.string());
    }
}

} // namespace toolagent
