// SPDX-License-Identifier: Apache-2.0
#include "toolagent/trainprep.hpp"

#include "toolagent/action.hpp"
#include "toolagent/tokenizer.hpp"

namespace toolagent {

WeightedSample weight_mask(const Conversation& conv) {
    validate(conv);
    WeightedSample sample;
    sample.id = conv.id;
    for (std::size_t i = 0; i < conv.messages.size(); ++i) {
        const auto& msg = conv.messages[i];
        std::size_t action_begin = 0;
        std::size_t action_end = 0;
        if (msg.role == Role::assistant) {
            std::optional<AgentAction> action;
            try {
                action = parse_action(msg.content);
            } catch (const ActionParseError&) {
                if (msg.request) throw;
            }
            if (action && action->is_tool_call()) {
                action_begin = action->span_begin;
                action_end = action->span_end;
            } else if (msg.request) {
                throw Error(Errc::malformed_action, "request has no action block in content",
                            "messages[" + std::to_string(i) + "]");
            }
        }
        for (const auto& span : token_spans(msg.content)) {
            sample.tokens.emplace_back(msg.content.substr(span.offset, span.length));
            std::uint8_t w = weight_context;
            if (msg.role == Role::assistant) {
                const bool overlaps = span.offset < action_end && span.end() > action_begin;
                w = overlaps ? weight_action : weight_text;
            }
            sample.weights.push_back(w);
        }
    }
    return sample;
}

Json to_json(const WeightedSample& sample) {
    Json weights = Json::array();
    for (auto w : sample.weights) weights.push_back(static_cast<int>(w));
    return Json{{"id", sample.id}, {"tokens", sample.tokens}, {"weights", std::move(weights)}};
}

WeightedSample weighted_sample_from_json(const Json& doc, const std::string& path) {
    if (!doc.is_object()) throw Error(Errc::malformed_document, "expected an object", path);
    WeightedSample sample;
    sample.id = doc.value("id", std::string{});
    const auto tokens = doc.find("tokens");
    const auto weights = doc.find("weights");
    if (tokens == doc.end() || !tokens->is_array()) {
        throw Error(Errc::malformed_document, "expected an array", path + ".tokens");
    }
    if (weights == doc.end() || !weights->is_array()) {
        throw Error(Errc::malformed_document, "expected an array", path + ".weights");
    }
    if (tokens->size() != weights->size()) {
        throw Error(Errc::invariant_violation, "tokens and weights differ in length", path);
    }
    for (std::size_t i = 0; i < tokens->size(); ++i) {
        const auto& t = (*tokens)[i];
        const auto& w = (*weights)[i];
        if (!t.is_string()) throw Error(Errc::malformed_document, "expected a string", path + ".tokens[" + std::to_string(i) + "]");
        if (!w.is_number_integer() || w.get<std::int64_t>() < 0 || w.get<std::int64_t>() > weight_action) {
            throw Error(Errc::malformed_document, "expected 0, 1 or 2", path + ".weights[" + std::to_string(i) + "]");
        }
        sample.tokens.push_back(t.get<std::string>());
        sample.weights.push_back(static_cast<std::uint8_t>(w.get<std::int64_t>()));
    }
    return sample;
}

} // namespace toolagent
