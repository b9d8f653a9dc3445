// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toolagent/core.hpp"
#include "toolagent/embedding.hpp"

namespace toolagent {

struct ChunkingOptions {
    std::size_t chunk_size = 256;
    std::size_t overlap = 32;
};

/// Token index ranges [first, second) for a document of `token_count` tokens.
/// A document that fits in one chunk yields exactly one range; otherwise a
/// chunk starts at every multiple of (chunk_size - overlap) below token_count.
[[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>>
chunk_ranges(std::size_t token_count, const ChunkingOptions& options);

struct Chunk {
    std::string doc_id;
    std::size_t index = 0;
    std::string text;

    bool operator==(const Chunk&) const = default;
};

struct KnowledgeHit {
    Chunk chunk;
    double score = 0.0;
};

/// Flat dense index over chunked local documents. Reads may run concurrently;
/// ingestion is exclusive.
class KnowledgeStore {
public:
    explicit KnowledgeStore(std::shared_ptr<const Embedder> embedder = default_embedder(),
                            ChunkingOptions options = {});

    /// Throws Error{duplicate_id} or Error{empty_input}.
    void ingest(const std::string& doc_id, std::string_view text);
    /// Ingests every regular file in `dir` (sorted by name); file name = doc_id.
    void ingest_directory(const std::filesystem::path& dir);

    /// Ranked by dot product, ties by (doc_id, chunk index). Throws
    /// Error{empty_index} when the store has no chunks.
    [[nodiscard]] std::vector<KnowledgeHit> search(std::string_view query, std::size_t k) const;
    [[nodiscard]] std::vector<std::string> retrieve(std::string_view query, std::size_t k) const;

    [[nodiscard]] std::size_t chunk_count() const;
    [[nodiscard]] bool empty() const { return chunk_count() == 0; }
    [[nodiscard]] std::vector<Chunk> chunks() const;
    [[nodiscard]] const ChunkingOptions& options() const noexcept { return options_; }

private:
    std::shared_ptr<const Embedder> embedder_;
    ChunkingOptions options_;
    mutable std::shared_mutex mutex_;
    std::vector<Chunk> chunks_;
    std::vector<Vector> vectors_;
    std::set<std::string, std::less<>> doc_ids_;
};

enum class PromptSection { system, api_schemas, knowledge, few_shot, history, current_query };

struct PromptBundle {
    std::string system_prompt;
    std::vector<ToolSchema> api_schemas;  // best-ranked first
    std::vector<std::string> knowledge;   // best-ranked first
    std::vector<Message> history;         // oldest first
    std::vector<std::string> few_shot;
    std::string current_query;
};

/// Order in which sections give up content when the prompt is over budget.
/// few_shot, knowledge and api_schemas lose their last entry first; history
/// loses its oldest message first. System prompt and query are never dropped.
struct PromptPolicy {
    std::vector<PromptSection> drop_order{PromptSection::few_shot, PromptSection::history,
                                          PromptSection::knowledge, PromptSection::api_schemas};
};

struct AssembledPrompt {
    std::string text;
    std::size_t tokens = 0;
    std::size_t schemas_kept = 0;
    std::size_t knowledge_kept = 0;
    std::size_t few_shot_kept = 0;
    std::size_t history_kept = 0;  // newest messages
};

inline constexpr std::string_view tools_header = "# TOOLS";
inline constexpr std::string_view knowledge_header = "# KNOWLEDGE";
inline constexpr std::string_view examples_header = "# EXAMPLES";
inline constexpr std::string_view history_header = "# HISTORY";

/// Compact JSON line the prompt uses for one tool: name, description, parameters.
[[nodiscard]] std::string render_tool_line(const ToolSchema& schema);
[[nodiscard]] std::string render_history_line(const Message& message);

/// Renders sections in the fixed order system, tools, knowledge, examples,
/// history, query, dropping content per `policy` until the result fits in
/// `budget` tokens. Throws Error{context_overflow} when the system prompt and
/// query alone exceed the budget.
[[nodiscard]] AssembledPrompt assemble_prompt(const PromptBundle& bundle, std::size_t budget,
                                              const PromptPolicy& policy = {});
[[nodiscard]] std::string build_prompt(const PromptBundle& bundle, std::size_t budget,
                                       const PromptPolicy& policy = {});

} // namespace toolagent
