// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <cstdio>

#include "toolagent/toolkit.hpp"

namespace toolagent {

namespace {

struct DefaultTool {
    const char* name;
    const char* description;
    std::vector<ToolParameter> parameters;
    const char* kind;  // selects the canned payload shape
};

std::string short_hash(const ApiRequest& request) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](std::string_view s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    mix(request.api_name);
    for (const auto& [k, v] : request.arguments) {
        mix(k);
        mix(v);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string arg_or(const ApiRequest& request, std::string_view key, std::string fallback = {}) {
    auto it = request.arguments.find(key);
    return it == request.arguments.end() ? std::move(fallback) : it->second;
}

const std::vector<DefaultTool>& default_tools() {
    static const std::vector<DefaultTool> tools = {
        {"text-to-image", "Draw a picture or image of the described scene. Input language: English.",
         {{"text", "prompt describing the image", true}, {"resolution", "output size such as 1024*1024", false}},
         "image"},
        {"text-to-image-zh", "根据文字描述画一幅图片。Draws an image from Chinese text. Input language: Chinese.",
         {{"text", "prompt describing the image", true}, {"resolution", "output size such as 1024*1024", false}},
         "image"},
        {"text-to-video", "Make a short video clip of the described scene. Input language: English.",
         {{"text", "prompt describing the video", true}},
         "video"},
        {"text-to-audio", "Read text aloud as speech audio. Input language: English.",
         {{"text", "text to read aloud", true}, {"gender", "voice gender", false}},
         "audio"},
        {"text-to-audio-zh", "把文字朗读成语音。Reads Chinese text aloud as speech audio. Input language: Chinese.",
         {{"text", "text to read aloud", true}, {"gender", "voice gender", false}},
         "audio"},
        {"image-chat", "Image chat. Answers questions about an image. Input language: English.",
         {{"image", "image URL", true}, {"text", "question about the image", true}},
         "chat"},
        {"translation-zh2en", "Translates Chinese text to English.",
         {{"text", "Chinese source text", true}},
         "translate"},
        {"translation-en2zh", "Translates English text to Chinese.",
         {{"text", "English source text", true}},
         "translate"},
        {"universal-ie-zh", "Extracts structured information. Input language: Chinese.",
         {{"input", "source text", true}, {"schema", "fields to extract", true}},
         "extract"},
        {"text-to-geographic-zh", "Extracts geographic information. Input language: Chinese.",
         {{"input", "source text", true}},
         "extract"},
        {"ner-zh", "Recognizes named entities in text. Input language: Chinese.",
         {{"input", "source text", true}},
         "extract"},
        {"api-retrieval", "Retrieves relevant APIs for a task description.",
         {{"query", "task description", true}},
         "search"},
        {"modelscope-retrieval", "Retrieves modelscope docs.",
         {{"query", "question about the model hub", true}},
         "search"},
    };
    return tools;
}

std::string canned_payload(std::string_view kind, const ApiRequest& request) {
    const auto id = short_hash(request);
    Json out;
    if (kind == "image") {
        out["result"] = "![IMAGE](https://mock.invalid/images/" + id + ".png)";
    } else if (kind == "video") {
        out["result"] = "<video src=\"https://mock.invalid/videos/" + id + ".mp4\">";
    } else if (kind == "audio") {
        out["result"] = "<audio src=\"https://mock.invalid/audio/" + id + ".wav\">";
    } else if (kind == "chat") {
        out["result"] = "The image shows what was asked about: " + arg_or(request, "text");
    } else if (kind == "translate") {
        out["result"] = "[translated] " + arg_or(request, "text");
    } else if (kind == "extract") {
        out["result"] = Json::array({Json{{"span", arg_or(request, "input")}, {"type", "mock"}}});
    } else {
        out["result"] = Json::array({"result-" + id.substr(0, 8)});
    }
    return dump_compact(out);
}

} // namespace

std::vector<ToolSchema> default_tool_schemas() {
    std::vector<ToolSchema> out;
    for (const auto& t : default_tools()) {
        out.push_back({t.name, t.description, t.parameters, Endpoint::local(t.name)});
    }
    return out;
}

void register_default_handlers(ToolRegistry& registry) {
    for (const auto& t : default_tools()) {
        std::string kind = t.kind;
        registry.register_handler(t.name, [kind](const ApiRequest& request) {
            return canned_payload(kind, request);
        });
    }
}

void register_default_tools(ToolRegistry& registry) {
    register_default_handlers(registry);
    for (auto& schema : default_tool_schemas()) registry.register_tool(std::move(schema));
}

} // namespace toolagent
