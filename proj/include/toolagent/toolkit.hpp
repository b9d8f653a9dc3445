// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "toolagent/core.hpp"
#include "toolagent/embedding.hpp"

namespace toolagent {

struct RetrievalHit {
    std::string tool_name;
    double score = 0.0;

    bool operator==(const RetrievalHit&) const = default;
};

/// Which text of a schema is embedded for retrieval.
enum class RetrievalKey { description, name_and_description };

struct RegistryOptions {
    RetrievalKey key = RetrievalKey::description;
    std::chrono::seconds remote_timeout{30};
};

/// A local tool implementation. The returned string becomes the success
/// payload; throwing produces an error result carrying the exception text.
using ToolHandler = std::function<std::string(const ApiRequest&)>;

/// Tool library: schemas, their cached embeddings, and local handlers.
/// Retrieval and execution may run concurrently; registration is exclusive.
class ToolRegistry {
public:
    explicit ToolRegistry(std::shared_ptr<const Embedder> embedder = default_embedder(),
                          RegistryOptions options = {});

    /// Adds or replaces the tool named schema.name and refreshes its embedding.
    void register_tool(ToolSchema schema);
    void register_handler(std::string handler_id, ToolHandler handler);

    [[nodiscard]] bool contains(std::string_view name) const;
    [[nodiscard]] std::optional<ToolSchema> find(std::string_view name) const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] bool empty() const { return size() == 0; }
    /// All schemas ordered by name.
    [[nodiscard]] std::vector<ToolSchema> schemas() const;

    /// Top min(k, size()) tools by dot product with embed(query), ties broken by
    /// name. Throws Error{empty_index} when nothing is registered.
    [[nodiscard]] std::vector<RetrievalHit> retrieve(std::string_view query, std::size_t k = 3) const;

    /// Never throws for unknown tools, missing arguments, or remote failures;
    /// those come back as an error ApiResult.
    [[nodiscard]] ApiResult execute(const ApiRequest& request) const;

    [[nodiscard]] const Embedder& embedder() const noexcept { return *embedder_; }

private:
    [[nodiscard]] std::string retrieval_text(const ToolSchema& schema) const;
    [[nodiscard]] ApiResult call_remote(const ToolSchema& schema, const ApiRequest& request) const;

    std::shared_ptr<const Embedder> embedder_;
    RegistryOptions options_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, ToolSchema, std::less<>> tools_;
    std::map<std::string, Vector, std::less<>> vectors_;
    std::map<std::string, ToolHandler, std::less<>> handlers_;
};

/// Mock implementations of the default model and common APIs. Every handler is
/// deterministic and returns a canned JSON payload.
[[nodiscard]] std::vector<ToolSchema> default_tool_schemas();
void register_default_handlers(ToolRegistry& registry);
void register_default_tools(ToolRegistry& registry);

} // namespace toolagent
