// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toolagent/core.hpp"

namespace toolagent {

struct LlmConfig {
    std::string model_name = "scripted";
    std::optional<std::string> endpoint;
    std::size_t max_context_tokens = 8192;
    double temperature = 0.0;
    std::size_t max_new_tokens = 512;

    /// Largest prompt, in tokens, that generate() accepts.
    [[nodiscard]] std::size_t prompt_budget() const noexcept { return max_context_tokens - max_new_tokens; }

    void validate() const;
};

[[nodiscard]] LlmConfig llm_config_from_json(const Json& doc);

/// A text-generation controller. generate() enforces the context budget and
/// delegates to the concrete backend.
class LlmBackend {
public:
    explicit LlmBackend(LlmConfig config);
    virtual ~LlmBackend() = default;

    LlmBackend(const LlmBackend&) = delete;
    LlmBackend& operator=(const LlmBackend&) = delete;

    [[nodiscard]] std::string generate(std::string_view prompt);
    [[nodiscard]] const LlmConfig& config() const noexcept { return config_; }

protected:
    virtual std::string do_generate(std::string_view prompt) = 0;

private:
    LlmConfig config_;
};

/// Replays a fixed list of completions in order, ignoring the prompt. Safe to
/// call from several threads; each call consumes exactly one entry.
class ScriptedBackend final : public LlmBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> script, LlmConfig config = {}, bool loop = false);

    /// Accepts either a JSON array of strings or {"responses": [...], "loop": bool}.
    static std::unique_ptr<ScriptedBackend> from_json(const Json& doc, LlmConfig config = {});
    static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& path, LlmConfig config = {});

    [[nodiscard]] std::size_t consumed() const;
    [[nodiscard]] std::size_t size() const noexcept { return script_.size(); }

protected:
    std::string do_generate(std::string_view prompt) override;

private:
    std::vector<std::string> script_;
    bool loop_;
    mutable std::mutex mutex_;
    std::size_t cursor_ = 0;
};

struct RetryPolicy {
    int max_retries = 2;
    std::chrono::milliseconds base_delay{100};
};

/// POSTs {"prompt", "max_new_tokens", "temperature", "model"} to the configured
/// endpoint and reads {"text"} back. Only transport failures are retried.
class HttpBackend final : public LlmBackend {
public:
    explicit HttpBackend(LlmConfig config, RetryPolicy retry = {});

    /// Attempts made by the most recent generate() call.
    [[nodiscard]] int last_attempts() const noexcept { return last_attempts_; }

protected:
    std::string do_generate(std::string_view prompt) override;

private:
    RetryPolicy retry_;
    std::atomic<int> last_attempts_{0};
};

/// Builds a backend from "scripted:<file.json>" or "http:<url>".
[[nodiscard]] std::unique_ptr<LlmBackend> make_backend(std::string_view spec, LlmConfig config = {});

} // namespace toolagent
