// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <random>

#include "toolagent/action.hpp"
#include "toolagent/executor.hpp"
#include "toolagent/io.hpp"
#include "toolagent/memory.hpp"
#include "toolagent/trainprep.hpp"

namespace toolagent {

namespace {

constexpr std::array<std::pair<InstanceType, std::string_view>, 4> type_names{{
    {InstanceType::common_api, "common_api"},
    {InstanceType::model_api, "model_api"},
    {InstanceType::api_oriented_qa, "api_oriented_qa"},
    {InstanceType::api_agnostic, "api_agnostic"},
}};

std::string trim_copy(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string_view type_guidance(InstanceType type) {
    switch (type) {
    case InstanceType::common_api:
        return "The instruction should need one of the general-purpose APIs to complete.";
    case InstanceType::model_api:
        return "The instruction should need one of the model APIs to complete.";
    case InstanceType::api_oriented_qa:
        return "The instruction should ask which API fits a task or how to call it.";
    case InstanceType::api_agnostic:
        return "The instruction should be ordinary chat that needs no API.";
    }
    return {};
}

} // namespace

std::string_view to_string(InstanceType type) noexcept {
    for (const auto& [t, name] : type_names) {
        if (t == type) return name;
    }
    return "common_api";
}

std::optional<InstanceType> instance_type_from_string(std::string_view text) noexcept {
    for (const auto& [t, name] : type_names) {
        if (name == text) return t;
    }
    return std::nullopt;
}

std::string_view to_string(FilterReason reason) noexcept {
    switch (reason) {
    case FilterReason::hallucinated_name: return "hallucinated_name";
    case FilterReason::illegal_request: return "illegal_request";
    case FilterReason::step_limit: return "step_limit";
    case FilterReason::backend_error: return "backend_error";
    }
    return "hallucinated_name";
}

namespace {

std::optional<FilterReason> filter_reason_from_string(std::string_view text) {
    for (auto r : {FilterReason::hallucinated_name, FilterReason::illegal_request, FilterReason::step_limit,
                   FilterReason::backend_error}) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

} // namespace

std::vector<CatalogEntry> catalog_from_json(const Json& doc) {
    const Json* list = &doc;
    std::string base = "$";
    if (doc.is_object()) {
        auto it = doc.find("apis");
        if (it == doc.end()) throw Error(Errc::malformed_document, "missing field", "$.apis");
        list = &*it;
        base = "$.apis";
    }
    if (!list->is_array()) throw Error(Errc::malformed_document, "expected an array", base);
    std::vector<CatalogEntry> entries;
    for (std::size_t i = 0; i < list->size(); ++i) {
        const auto path = base + "[" + std::to_string(i) + "]";
        const auto& item = (*list)[i];
        CatalogEntry entry;
        entry.schema = tool_schema_from_json(item, path);
        validate(entry.schema);
        const auto category = item.value("category", std::string("common_api"));
        auto type = instance_type_from_string(category);
        if (!type) throw Error(Errc::malformed_document, "unknown category '" + category + "'", path + ".category");
        entry.category = *type;
        for (const auto& e : entries) {
            if (e.schema.name == entry.schema.name) throw Error(Errc::duplicate_id, "duplicate API name", path + ".name");
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<CatalogEntry> load_catalog(const std::filesystem::path& path) {
    return catalog_from_json(read_json_file(path));
}

GenInstance filter_instance(GenInstance inst, const std::vector<ToolSchema>& apis) {
    if (!inst.verdict.kept) return inst;
    const auto& messages = inst.conversation.messages;
    for (std::size_t i = 0; i < messages.size(); ++i) {
        const auto& msg = messages[i];
        if (msg.role != Role::assistant) continue;
        const auto where = "messages[" + std::to_string(i) + "]: ";
        AgentAction action;
        try {
            action = parse_action(msg.content);
        } catch (const ActionParseError& e) {
            inst.verdict = Verdict::filtered(FilterReason::illegal_request, where + e.what());
            return inst;
        }
        if (!action.is_tool_call()) {
            if (msg.request) {
                inst.verdict = Verdict::filtered(FilterReason::illegal_request, where + "request without an action block");
                return inst;
            }
            continue;
        }
        const auto& request = *action.request;
        auto schema = std::find_if(apis.begin(), apis.end(),
                                   [&](const ToolSchema& s) { return s.name == request.api_name; });
        if (schema == apis.end()) {
            inst.verdict = Verdict::filtered(FilterReason::hallucinated_name,
                                             where + "unknown API '" + request.api_name + "'");
            return inst;
        }
        for (const auto& [name, _] : request.arguments) {
            if (schema->find_parameter(name) == nullptr) {
                inst.verdict = Verdict::filtered(FilterReason::hallucinated_name,
                                                 where + "argument '" + name + "' is not declared by '" +
                                                     request.api_name + "'");
                return inst;
            }
        }
        for (const auto& p : schema->parameters) {
            if (p.required && !request.arguments.contains(p.name)) {
                inst.verdict = Verdict::filtered(FilterReason::illegal_request,
                                                 where + "missing required argument '" + p.name + "'");
                return inst;
            }
        }
    }
    inst.verdict = Verdict::keep();
    return inst;
}

std::vector<std::string> DatagenOptions::default_demonstrations() {
    return {
        "Draw a watercolor picture of a lighthouse at dusk.",
        "Translate \"the meeting moved to Friday\" into Chinese.",
        "Which API should I use to pull the place names out of a news article?",
        "What is a good name for a cat that likes to sleep in boxes?",
        "帮我生成一段关于春天的短视频。",
        "请把这句话翻译成英文：今天天气很好。",
    };
}

namespace {

std::string user_prompt(const GenInstance& inst, const std::vector<std::string>& demos, bool follow_up) {
    std::string out =
        "You are role-playing a user of an AI assistant that can call the APIs listed below.\n";
    out += type_marker;
    out += to_string(inst.type);
    out += '\n';
    out += type_guidance(inst.type);
    out += '\n';
    out += language_marker;
    out += inst.language;
    out += "\n\n";
    out += examples_header;
    out += '\n';
    for (std::size_t i = 0; i < demos.size(); ++i) {
        if (i > 0) out += '\n';
        out += demos[i];
    }
    out += "\n\n# APIS\n";
    for (const auto& api : inst.apis_offered) {
        out += api_marker;
        out += render_tool_line(api);
        out += '\n';
    }
    if (follow_up) {
        out += "\n# DIALOGUE\n";
        for (const auto& m : inst.conversation.messages) {
            out += render_history_line(m);
            out += '\n';
        }
        out += "\nWrite the user's next message, or ";
        out += end_of_dialogue;
        out += " if the user is done.";
    } else {
        out += "\nWrite the user's first message only.";
    }
    return out;
}

std::string api_prompt(const ToolSchema* schema, const ApiRequest& request) {
    std::string out = "You are simulating an API. Reply with the response body only.\n";
    out += api_marker;
    out += schema ? render_tool_line(*schema) : dump_compact(Json{{"name", request.api_name}});
    out += '\n';
    out += request_marker;
    out += dump_compact(to_json(request));
    return out;
}

} // namespace

std::vector<GenInstance> generate_instances(LlmBackend& user_llm, LlmBackend& agent_llm, LlmBackend& api_sim,
                                            const std::vector<CatalogEntry>& apis, std::size_t n,
                                            const DatagenOptions& options) {
    if (n == 0) throw Error(Errc::invalid_config, "n must be positive");
    if (apis.empty()) throw Error(Errc::invalid_config, "the API catalog is empty");
    if (options.languages.empty()) throw Error(Errc::invalid_config, "no languages configured");
    if (options.max_steps == 0 || options.max_user_turns == 0 || options.apis_per_instance == 0) {
        throw Error(Errc::invalid_config, "max_steps, max_user_turns and apis_per_instance must be positive");
    }

    std::mt19937_64 rng(options.seed);
    std::vector<GenInstance> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        GenInstance inst;
        inst.conversation.id = "gen-" + std::to_string(i);
        inst.type = std::get<0>(type_names[i % type_names.size()]);
        inst.language = options.languages[std::uniform_int_distribution<std::size_t>(0, options.languages.size() - 1)(rng)];

        std::vector<const CatalogEntry*> pool;
        for (const auto& e : apis) {
            if (e.category == inst.type) pool.push_back(&e);
        }
        if (pool.empty()) {
            for (const auto& e : apis) pool.push_back(&e);
        }
        std::vector<const CatalogEntry*> chosen;
        std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), options.apis_per_instance, rng);
        for (const auto* e : chosen) inst.apis_offered.push_back(e->schema);

        std::vector<std::string> demos;
        std::sample(options.demonstrations.begin(), options.demonstrations.end(), std::back_inserter(demos),
                    options.demos_per_prompt, rng);

        auto& messages = inst.conversation.messages;
        try {
            bool stop = false;
            for (std::size_t turn = 0; turn < options.max_user_turns && !stop; ++turn) {
                auto instruction = trim_copy(user_llm.generate(user_prompt(inst, demos, turn > 0)));
                if (turn > 0 && (instruction.empty() || instruction == end_of_dialogue)) break;
                if (instruction.empty()) throw Error(Errc::malformed_document, "user backend returned no instruction");
                const auto query_index = messages.size();
                messages.push_back(Message::user(instruction));

                PromptBundle bundle;
                bundle.system_prompt = default_system_prompt();
                bundle.api_schemas = inst.apis_offered;
                bundle.current_query = instruction;
                std::size_t steps = 0;
                while (true) {
                    bundle.history.clear();
                    for (std::size_t m = 0; m < messages.size(); ++m) {
                        if (m != query_index) bundle.history.push_back(messages[m]);
                    }
                    auto output = agent_llm.generate(build_prompt(bundle, agent_llm.config().prompt_budget()));
                    auto action = try_parse_action(output);
                    if (!action) {
                        // Left for the filter to classify.
                        messages.push_back(Message::assistant(std::move(output)));
                        stop = true;
                        break;
                    }
                    if (!action->is_tool_call()) {
                        messages.push_back(Message::assistant(std::move(output)));
                        break;
                    }
                    const auto request = *action->request;
                    messages.push_back(Message::assistant(std::move(output), request));
                    if (steps == options.max_steps) {
                        inst.verdict = Verdict::filtered(FilterReason::step_limit,
                                                         "more than " + std::to_string(options.max_steps) +
                                                             " tool calls in one user turn");
                        stop = true;
                        break;
                    }
                    auto schema = std::find_if(inst.apis_offered.begin(), inst.apis_offered.end(),
                                               [&](const ToolSchema& s) { return s.name == request.api_name; });
                    const ToolSchema* schema_ptr = schema == inst.apis_offered.end() ? nullptr : &*schema;
                    auto payload = api_sim.generate(api_prompt(schema_ptr, request));
                    messages.push_back(Message::tool(ApiResult::success(request.api_name, trim_copy(payload))));
                    ++steps;
                }
            }
        } catch (const Error& e) {
            inst.verdict = Verdict::filtered(FilterReason::backend_error, e.what());
        }
        const auto offered = inst.apis_offered;
        out.push_back(filter_instance(std::move(inst), offered));
    }
    return out;
}

DatasetStats dataset_stats(const std::vector<GenInstance>& instances) {
    DatasetStats stats;
    stats.instances = instances.size();
    for (const auto& inst : instances) {
        if (!inst.verdict.kept) {
            ++stats.filtered;
            ++stats.filtered_by_reason[std::string(to_string(inst.verdict.reason))];
            continue;
        }
        ++stats.kept;
        ++stats.by_language[inst.language];
        ++stats.by_type[std::string(to_string(inst.type))];
        for (const auto& m : inst.conversation.messages) {
            if (m.role == Role::user) ++stats.user_turns;
            if (m.role == Role::assistant && m.request) ++stats.tool_calls;
        }
    }
    if (stats.kept > 0) stats.avg_turn = static_cast<double>(stats.user_turns) / static_cast<double>(stats.kept);
    if (stats.user_turns > 0) {
        stats.avg_step = static_cast<double>(stats.tool_calls) / static_cast<double>(stats.user_turns);
    }
    return stats;
}

Json to_json(const DatasetStats& stats) {
    auto counts = [](const std::map<std::string, std::size_t>& m) {
        Json obj = Json::object();
        for (const auto& [k, v] : m) obj[k] = v;
        return obj;
    };
    return Json{{"instances", stats.instances},
                {"kept", stats.kept},
                {"filtered", stats.filtered},
                {"user_turns", stats.user_turns},
                {"tool_calls", stats.tool_calls},
                {"avg_turn", stats.avg_turn},
                {"avg_step", stats.avg_step},
                {"by_language", counts(stats.by_language)},
                {"by_type", counts(stats.by_type)},
                {"filtered_by_reason", counts(stats.filtered_by_reason)}};
}

Json to_json(const GenInstance& inst) {
    Json apis = Json::array();
    for (const auto& s : inst.apis_offered) apis.push_back(to_json(s));
    Json doc{{"conversation", to_json(inst.conversation)},
             {"apis_offered", std::move(apis)},
             {"type", to_string(inst.type)},
             {"language", inst.language},
             {"verdict", inst.verdict.kept ? "kept" : "filtered"}};
    if (!inst.verdict.kept) {
        doc["reason"] = to_string(inst.verdict.reason);
        doc["detail"] = inst.verdict.detail;
    }
    return doc;
}

GenInstance gen_instance_from_json(const Json& doc, const std::string& path) {
    if (!doc.is_object()) throw Error(Errc::malformed_document, "expected an object", path);
    GenInstance inst;
    auto conv = doc.find("conversation");
    if (conv == doc.end()) throw Error(Errc::malformed_document, "missing field", path + ".conversation");
    inst.conversation = conversation_from_json(*conv, path + ".conversation");
    if (auto apis = doc.find("apis_offered"); apis != doc.end()) {
        if (!apis->is_array()) throw Error(Errc::malformed_document, "expected an array", path + ".apis_offered");
        for (std::size_t i = 0; i < apis->size(); ++i) {
            inst.apis_offered.push_back(
                tool_schema_from_json((*apis)[i], path + ".apis_offered[" + std::to_string(i) + "]"));
        }
    }
    const auto type = doc.value("type", std::string("common_api"));
    auto parsed_type = instance_type_from_string(type);
    if (!parsed_type) throw Error(Errc::malformed_document, "unknown type '" + type + "'", path + ".type");
    inst.type = *parsed_type;
    inst.language = doc.value("language", std::string("en"));
    const auto verdict = doc.value("verdict", std::string("kept"));
    if (verdict == "filtered") {
        const auto reason = doc.value("reason", std::string{});
        auto parsed = filter_reason_from_string(reason);
        if (!parsed) throw Error(Errc::malformed_document, "unknown reason '" + reason + "'", path + ".reason");
        inst.verdict = Verdict::filtered(*parsed, doc.value("detail", std::string{}));
    } else if (verdict != "kept") {
        throw Error(Errc::malformed_document, "unknown verdict '" + verdict + "'", path + ".verdict");
    }
    return inst;
}

} // namespace toolagent
