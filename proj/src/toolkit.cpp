// SPDX-License-Identifier: Apache-2.0
#include "toolagent/toolkit.hpp"

#include <httplib.h>

#include <algorithm>
#include <mutex>

#include "http_url.hpp"

namespace toolagent {

ToolRegistry::ToolRegistry(std::shared_ptr<const Embedder> embedder, RegistryOptions options)
    : embedder_(std::move(embedder)), options_(options) {
    if (!embedder_) throw Error(Errc::invalid_config, "tool registry needs an embedder");
}

std::string ToolRegistry::retrieval_text(const ToolSchema& schema) const {
    if (options_.key == RetrievalKey::name_and_description) {
        return schema.name + ": " + schema.description;
    }
    return schema.description;
}

void ToolRegistry::register_tool(ToolSchema schema) {
    validate(schema);
    // Embed outside the lock; it is the expensive part.
    auto vector = embedder_->embed(retrieval_text(schema));
    std::unique_lock lock(mutex_);
    auto name = schema.name;
    vectors_[name] = std::move(vector);
    tools_[std::move(name)] = std::move(schema);
}

void ToolRegistry::register_handler(std::string handler_id, ToolHandler handler) {
    std::unique_lock lock(mutex_);
    handlers_[std::move(handler_id)] = std::move(handler);
}

bool ToolRegistry::contains(std::string_view name) const {
    std::shared_lock lock(mutex_);
    return tools_.find(name) != tools_.end();
}

std::optional<ToolSchema> ToolRegistry::find(std::string_view name) const {
    std::shared_lock lock(mutex_);
    auto it = tools_.find(name);
    if (it == tools_.end()) return std::nullopt;
    return it->second;
}

std::size_t ToolRegistry::size() const {
    std::shared_lock lock(mutex_);
    return tools_.size();
}

std::vector<ToolSchema> ToolRegistry::schemas() const {
    std::shared_lock lock(mutex_);
    std::vector<ToolSchema> out;
    out.reserve(tools_.size());
    for (const auto& [_, schema] : tools_) out.push_back(schema);
    return out;
}

std::vector<RetrievalHit> ToolRegistry::retrieve(std::string_view query, std::size_t k) const {
    if (k == 0) throw Error(Errc::invalid_config, "k must be positive");
    const auto q = embedder_->embed(query);

    std::vector<RetrievalHit> hits;
    {
        std::shared_lock lock(mutex_);
        if (vectors_.empty()) throw Error(Errc::empty_index, "no tools registered");
        hits.reserve(vectors_.size());
        for (const auto& [name, v] : vectors_) hits.push_back({name, dot(q, v)});
    }
    const auto keep = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                      [](const RetrievalHit& a, const RetrievalHit& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.tool_name < b.tool_name;
                      });
    hits.resize(keep);
    return hits;
}

ApiResult ToolRegistry::execute(const ApiRequest& request) const {
    ToolSchema schema;
    ToolHandler handler;
    {
        std::shared_lock lock(mutex_);
        auto it = tools_.find(request.api_name);
        if (it == tools_.end()) {
            return ApiResult::failure(request.api_name, "unknown tool '" + request.api_name + "'");
        }
        schema = it->second;
        if (!schema.endpoint.is_remote()) {
            auto h = handlers_.find(schema.endpoint.target);
            if (h != handlers_.end()) handler = h->second;
        }
    }

    for (const auto& param : schema.parameters) {
        if (param.required && !request.arguments.contains(param.name)) {
            return ApiResult::failure(request.api_name, "missing required argument '" + param.name + "'");
        }
    }

    if (schema.endpoint.is_remote()) return call_remote(schema, request);

    if (!handler) {
        return ApiResult::failure(request.api_name,
                                  "no local handler '" + schema.endpoint.target + "' is installed");
    }
    try {
        return ApiResult::success(request.api_name, handler(request));
    } catch (const std::exception& e) {
        return ApiResult::failure(request.api_name, e.what());
    }
}

ApiResult ToolRegistry::call_remote(const ToolSchema& schema, const ApiRequest& request) const {
    detail::HttpTarget target;
    try {
        target = detail::split_url(schema.endpoint.target);
    } catch (const Error& e) {
        return ApiResult::failure(request.api_name, e.what());
    }
    Json body = Json::object();
    for (const auto& [k, v] : request.arguments) body[k] = v;

    httplib::Client client(target.scheme_host_port);
    client.set_connection_timeout(std::chrono::seconds(5));
    client.set_read_timeout(options_.remote_timeout);
    auto res = client.Post(target.path, dump_compact(body), "application/json");
    if (!res) {
        return ApiResult::failure(request.api_name,
                                  "transport failure: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        return ApiResult::failure(request.api_name,
                                  "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    return ApiResult::success(request.api_name, res->body);
}

} // namespace toolagent
