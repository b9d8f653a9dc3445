// SPDX-License-Identifier: Apache-2.0
#include "toolagent/executor.hpp"

namespace toolagent {

std::string_view to_string(Termination t) noexcept {
    return t == Termination::step_limit ? "step_limit" : "final_answer";
}

std::string AgentRunRecord::final_answer() const {
    for (auto it = conversation.messages.rbegin(); it != conversation.messages.rend(); ++it) {
        if (it->role == Role::assistant) return it->content;
    }
    return {};
}

Json to_json(const AgentRunRecord& record) {
    return Json{{"conversation", to_json(record.conversation)},
                {"steps_taken", record.steps_taken},
                {"terminated_by", to_string(record.terminated_by)}};
}

AgentRunRecord run_record_from_json(const Json& doc) {
    if (!doc.is_object()) throw Error(Errc::malformed_document, "expected an object", "$");
    AgentRunRecord record;
    auto conv = doc.find("conversation");
    if (conv == doc.end()) throw Error(Errc::malformed_document, "missing field", "$.conversation");
    record.conversation = conversation_from_json(*conv, "$.conversation");
    validate(record.conversation);
    auto steps = doc.find("steps_taken");
    if (steps == doc.end() || !steps->is_number_unsigned()) {
        throw Error(Errc::malformed_document, "expected a non-negative integer", "$.steps_taken");
    }
    record.steps_taken = steps->get<std::size_t>();
    const auto term = doc.value("terminated_by", std::string("final_answer"));
    if (term == "step_limit") {
        record.terminated_by = Termination::step_limit;
    } else if (term != "final_answer") {
        throw Error(Errc::malformed_document, "unknown termination '" + term + "'", "$.terminated_by");
    }
    return record;
}

std::string default_system_prompt() {
    return "You are a helpful assistant that can use tools. To call a tool, end your reply with one line "
           "of the form ACTION: {\"api_name\": \"<tool name>\", \"parameters\": {\"<argument>\": \"<value>\"}} "
           "using only the tools listed under # TOOLS. Tool results are returned to you as tool turns. When no "
           "tool is needed, answer the user directly without an ACTION line.";
}

Agent::Agent(LlmBackend& llm, const ToolRegistry* tools, const KnowledgeStore* knowledge, AgentOptions options)
    : llm_(llm), tools_(tools), knowledge_(knowledge), options_(std::move(options)) {
    if (options_.max_iterations == 0) throw Error(Errc::invalid_config, "max_iterations must be positive");
    if (options_.use_tools && (tools_ == nullptr || tools_->empty())) {
        throw Error(Errc::invalid_config, "tool use is enabled but the registry is empty");
    }
}

AgentRunRecord Agent::run(std::string_view user_query, const Conversation* prior) const {
    AgentRunRecord record;
    record.conversation.id = prior ? prior->id : options_.conversation_id;
    if (prior) record.conversation.messages = prior->messages;
    const auto query_index = record.conversation.messages.size();
    record.conversation.messages.push_back(Message::user(std::string(user_query)));
    validate(record.conversation);
    auto& messages = record.conversation.messages;

    auto ranked_schemas = [&](std::string_view key) {
        std::vector<ToolSchema> schemas;
        if (!options_.use_tools) return schemas;
        for (const auto& hit : tools_->retrieve(key, options_.tool_top_k)) {
            if (auto schema = tools_->find(hit.tool_name)) schemas.push_back(std::move(*schema));
        }
        return schemas;
    };

    PromptBundle bundle;
    bundle.system_prompt = options_.system_prompt;
    bundle.few_shot = options_.few_shot;
    bundle.current_query = std::string(user_query);
    bundle.api_schemas = ranked_schemas(user_query);
    if (knowledge_ != nullptr && !knowledge_->empty()) {
        bundle.knowledge = knowledge_->retrieve(user_query, options_.knowledge_top_k);
    }

    auto refresh_history = [&] {
        bundle.history.clear();
        for (std::size_t i = 0; i < messages.size(); ++i) {
            if (i != query_index) bundle.history.push_back(messages[i]);
        }
    };
    const auto budget = llm_.config().prompt_budget();

    while (record.steps_taken < options_.max_iterations) {
        refresh_history();
        auto output = llm_.generate(build_prompt(bundle, budget, options_.prompt_policy));

        AgentAction action;
        try {
            action = parse_action(output);
        } catch (const ActionParseError& e) {
            // The model gets to see why its action was rejected.
            messages.push_back(Message::assistant(std::move(output)));
            messages.push_back(Message::tool(ApiResult::failure(
                std::string(invalid_action_api),
                std::string("could not parse action: ") + e.what() + " in: " + e.span())));
            ++record.steps_taken;
            continue;
        }

        if (!action.is_tool_call()) {
            messages.push_back(Message::assistant(std::move(output)));
            record.terminated_by = Termination::final_answer;
            return record;
        }

        auto request = *action.request;
        messages.push_back(Message::assistant(std::move(output), request));
        auto result = options_.use_tools
                          ? tools_->execute(request)
                          : ApiResult::failure(request.api_name, "tool use is disabled");
        messages.push_back(Message::tool(std::move(result)));
        ++record.steps_taken;

        if (options_.retrieve_tools_each_step) {
            bundle.api_schemas = ranked_schemas(std::string(user_query) + "\n" + messages.back().content);
        }
    }

    // Out of steps: one last generation with no tools on offer.
    refresh_history();
    bundle.api_schemas.clear();
    messages.push_back(Message::assistant(llm_.generate(build_prompt(bundle, budget, options_.prompt_policy))));
    record.terminated_by = Termination::step_limit;
    return record;
}

} // namespace toolagent
