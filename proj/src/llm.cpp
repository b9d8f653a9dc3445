// SPDX-License-Identifier: Apache-2.0
#include "toolagent/llm.hpp"

#include <httplib.h>

#include <thread>

#include "http_url.hpp"
#include "toolagent/io.hpp"
#include "toolagent/tokenizer.hpp"

namespace toolagent {

void LlmConfig::validate() const {
    if (model_name.empty()) throw Error(Errc::invalid_config, "model_name is empty");
    if (max_new_tokens == 0) throw Error(Errc::invalid_config, "max_new_tokens must be positive");
    if (max_context_tokens <= max_new_tokens) {
        throw Error(Errc::invalid_config, "max_context_tokens must exceed max_new_tokens");
    }
    if (!(temperature >= 0.0)) throw Error(Errc::invalid_config, "temperature must be non-negative");
}

LlmConfig llm_config_from_json(const Json& doc) {
    LlmConfig config;
    if (!doc.is_object()) throw Error(Errc::malformed_document, "LLM config must be an object");
    try {
        config.model_name = doc.value("model_name", config.model_name);
        if (auto it = doc.find("endpoint"); it != doc.end() && !it->is_null()) {
            config.endpoint = it->get<std::string>();
        }
        config.max_context_tokens = doc.value("max_context_tokens", config.max_context_tokens);
        config.max_new_tokens = doc.value("max_new_tokens", config.max_new_tokens);
        config.temperature = doc.value("temperature", config.temperature);
    } catch (const Json::exception& e) {
        throw Error(Errc::malformed_document, e.what(), "llm");
    }
    config.validate();
    return config;
}

LlmBackend::LlmBackend(LlmConfig config) : config_(std::move(config)) {
    config_.validate();
}

std::string LlmBackend::generate(std::string_view prompt) {
    const auto tokens = count_tokens(prompt);
    if (tokens > config_.prompt_budget()) {
        throw Error(Errc::context_overflow,
                    "prompt has " + std::to_string(tokens) + " tokens, budget is " +
                        std::to_string(config_.prompt_budget()),
                    config_.model_name);
    }
    return do_generate(prompt);
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> script, LlmConfig config, bool loop)
    : LlmBackend(std::move(config)), script_(std::move(script)), loop_(loop) {}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_json(const Json& doc, LlmConfig config) {
    const Json* responses = &doc;
    bool loop = false;
    if (doc.is_object()) {
        auto it = doc.find("responses");
        if (it == doc.end()) throw Error(Errc::malformed_document, "missing field", "$.responses");
        responses = &*it;
        if (auto l = doc.find("loop"); l != doc.end()) {
            if (!l->is_boolean()) throw Error(Errc::malformed_document, "expected a boolean", "$.loop");
            loop = l->get<bool>();
        }
    }
    if (!responses->is_array()) throw Error(Errc::malformed_document, "script must be an array of strings", "$");
    std::vector<std::string> script;
    for (std::size_t i = 0; i < responses->size(); ++i) {
        const auto& entry = (*responses)[i];
        if (!entry.is_string()) {
            throw Error(Errc::malformed_document, "expected a string", "$[" + std::to_string(i) + "]");
        }
        script.push_back(entry.get<std::string>());
    }
    return std::make_unique<ScriptedBackend>(std::move(script), std::move(config), loop);
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path, LlmConfig config) {
    try {
        return from_json(read_json_file(path), std::move(config));
    } catch (const Error& e) {
        if (e.code() == Errc::io) throw;
        throw Error(e.code(), e.what(), path.string());
    }
}

std::size_t ScriptedBackend::consumed() const {
    std::lock_guard lock(mutex_);
    return cursor_;
}

std::string ScriptedBackend::do_generate(std::string_view) {
    std::lock_guard lock(mutex_);
    if (script_.empty() || (!loop_ && cursor_ >= script_.size())) {
        throw Error(Errc::script_exhausted,
                    "script exhausted after " + std::to_string(cursor_) + " responses",
                    config().model_name);
    }
    return script_[cursor_++ % script_.size()];
}

HttpBackend::HttpBackend(LlmConfig config, RetryPolicy retry)
    : LlmBackend(std::move(config)), retry_(retry) {
    if (!this->config().endpoint) throw Error(Errc::invalid_config, "HTTP backend needs an endpoint");
    (void)detail::split_url(*this->config().endpoint, "/generate");
}

std::string HttpBackend::do_generate(std::string_view prompt) {
    const auto target = detail::split_url(*config().endpoint, "/generate");
    const Json body{{"prompt", prompt},
                    {"max_new_tokens", config().max_new_tokens},
                    {"temperature", config().temperature},
                    {"model", config().model_name}};
    const auto payload = dump_compact(body);

    httplib::Client client(target.scheme_host_port);
    client.set_connection_timeout(std::chrono::seconds(5));
    client.set_read_timeout(std::chrono::seconds(120));

    int attempts = 0;
    httplib::Result res{nullptr, httplib::Error::Unknown};
    for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(retry_.base_delay * (1 << (attempt - 1)));
        ++attempts;
        res = client.Post(target.path, payload, "application/json");
        if (res) break;
    }
    last_attempts_ = attempts;
    if (!res) {
        throw Error(Errc::transport, "request failed: " + httplib::to_string(res.error()),
                    *config().endpoint);
    }
    if (res->status != 200) {
        throw Error(Errc::transport, "HTTP " + std::to_string(res->status), *config().endpoint);
    }
    Json reply = Json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
        throw Error(Errc::malformed_document, "expected {\"text\": ...} in response", *config().endpoint);
    }
    auto text = reply["text"].get<std::string>();
    // Some completion servers return prompt + continuation.
    if (!prompt.empty() && std::string_view(text).starts_with(prompt)) text.erase(0, prompt.size());
    return text;
}

std::unique_ptr<LlmBackend> make_backend(std::string_view spec, LlmConfig config) {
    if (spec.starts_with("scripted:")) {
        return ScriptedBackend::from_file(std::string(spec.substr(9)), std::move(config));
    }
    if (spec.starts_with("http:")) {
        auto url = std::string(spec.substr(5));
        // Both "http:<url>" and a bare "http://host:port" are accepted.
        if (!url.starts_with("http://")) url = "http:" + url;
        config.endpoint = url;
        return std::make_unique<HttpBackend>(std::move(config));
    }
    throw Error(Errc::invalid_config, "backend must be scripted:<file> or http:<url>", std::string(spec));
}

} // namespace toolagent
