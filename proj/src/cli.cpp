// SPDX-License-Identifier: Apache-2.0
#include "toolagent/cli.hpp"

#include <csignal>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "toolagent/arena.hpp"
#include "toolagent/arena_server.hpp"
#include "toolagent/eval.hpp"
#include "toolagent/executor.hpp"
#include "toolagent/io.hpp"
#include "toolagent/trainprep.hpp"

namespace toolagent {

namespace {

constexpr const char* version = "0.1.0";

// Config file format: a JSON object whose keys are subcommand names mapping
// to objects of flag names without dashes, e.g.
//   {"run": {"backend": "sim", "max-iterations": 3}, "tools": {"list": {...}}}
class JsonConfig final : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        return dump(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::stringstream buffer;
        buffer << input.rdbuf();
        Json doc = Json::parse(buffer.str(), nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            throw CLI::ConfigError("config file must contain a JSON object");
        }
        std::vector<CLI::ConfigItem> items;
        flatten(doc, {}, items);
        return items;
    }

private:
    static void flatten(const Json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : obj.items()) {
            if (value.is_object()) {
                auto next = parents;
                next.push_back(key);
                flatten(value, next, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else if (!value.is_null()) {
                item.inputs.push_back(scalar(value));
            }
            out.push_back(std::move(item));
        }
    }

    static std::string scalar(const Json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static Json dump(const CLI::App* app, bool default_also) {
        Json out = Json::object();
        for (const auto* opt : app->get_options()) {
            if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
            const auto& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& results = opt->results();
                if (opt->get_expected_max() <= 1 && results.size() == 1) {
                    out[name] = results.front();
                } else if (opt->get_type_size() == 0) {
                    out[name] = true;
                } else {
                    out[name] = results;
                }
            } else if (default_also && !opt->get_default_str().empty()) {
                out[name] = opt->get_default_str();
            }
        }
        for (const auto* sub : app->get_subcommands({})) {
            auto nested = dump(sub, default_also);
            if (!nested.empty()) out[sub->get_name()] = std::move(nested);
        }
        return out;
    }
};

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        std::cout.flush();
    } else {
        write_file_atomic(out_path, text);
    }
}

// Registry holding the built-in mock tools, or the manifest's tools. Local
// tools without a built-in implementation echo their arguments.
void load_tools(ToolRegistry& registry, const std::string& manifest) {
    register_default_handlers(registry);
    if (manifest.empty()) {
        for (auto& schema : default_tool_schemas()) registry.register_tool(std::move(schema));
        return;
    }
    std::set<std::string> builtin;
    for (const auto& s : default_tool_schemas()) builtin.insert(s.name);
    for (auto& schema : load_tool_manifest(manifest)) {
        if (!schema.endpoint.is_remote() && !builtin.contains(schema.endpoint.target)) {
            registry.register_handler(schema.endpoint.target, [](const ApiRequest& request) {
                Json args = Json::object();
                for (const auto& [k, v] : request.arguments) args[k] = v;
                return dump_compact(Json{{"status", "ok"}, {"api_name", request.api_name}, {"arguments", args}});
            });
        }
        registry.register_tool(std::move(schema));
    }
}

struct RunArgs {
    std::string query;
    std::string backend = "sim";
    std::string tools;
    std::string knowledge;
    std::string system_prompt;
    std::size_t max_iterations = 5;
    std::size_t tool_top_k = 3;
    std::size_t knowledge_top_k = 3;
    std::size_t context_tokens = 8192;
    std::size_t max_new_tokens = 512;
    bool no_tools = false;
    bool retrieve_each_step = false;
    bool answer_only = false;
    std::string out;
};

int cmd_run(const RunArgs& a) {
    LlmConfig config;
    config.max_context_tokens = a.context_tokens;
    config.max_new_tokens = a.max_new_tokens;
    config.validate();
    auto backend = load_backend(a.backend, {}, config);

    ToolRegistry registry;
    if (!a.no_tools) load_tools(registry, a.tools);
    KnowledgeStore knowledge;
    if (!a.knowledge.empty()) knowledge.ingest_directory(a.knowledge);

    AgentOptions options;
    if (!a.system_prompt.empty()) options.system_prompt = a.system_prompt;
    options.max_iterations = a.max_iterations;
    options.tool_top_k = a.tool_top_k;
    options.knowledge_top_k = a.knowledge_top_k;
    options.use_tools = !a.no_tools;
    options.retrieve_tools_each_step = a.retrieve_each_step;

    const Agent agent(*backend, &registry, &knowledge, options);
    const auto record = agent.run(a.query);
    emit(a.out, a.answer_only ? record.final_answer() + "\n" : to_json(record).dump(2) + "\n");
    return 0;
}

struct EvalArgs {
    std::string gold;
    std::string pred;
    bool micro = false;
    std::string out;
};

int cmd_eval(const EvalArgs& a) {
    const auto gold = read_conversations_jsonl(a.gold);
    const auto pred = read_conversations_jsonl(a.pred);
    EvalOptions options;
    options.f1_averaging = a.micro ? F1Averaging::micro : F1Averaging::macro;
    emit(a.out, to_json(evaluate(gold, pred, options)).dump(2) + "\n");
    return 0;
}

struct DatagenArgs {
    std::string apis;
    std::size_t n = 0;
    std::string out;
    std::string stats;
    std::string rejects;
    std::uint64_t seed = 0;
    std::size_t max_steps = 8;
    std::size_t max_user_turns = 1;
    std::size_t apis_per_instance = 3;
    std::string user_backend = "sim-user";
    std::string agent_backend = "sim-agent";
    std::string api_backend = "sim-api";
};

int cmd_datagen(const DatagenArgs& a) {
    const auto catalog = load_catalog(a.apis);
    auto user = load_backend(a.user_backend);
    auto agent = load_backend(a.agent_backend);
    auto api = load_backend(a.api_backend);
    DatagenOptions options;
    options.seed = a.seed;
    options.max_steps = a.max_steps;
    options.max_user_turns = a.max_user_turns;
    options.apis_per_instance = a.apis_per_instance;
    const auto instances = generate_instances(*user, *agent, *api, catalog, a.n, options);

    std::vector<Json> kept;
    std::vector<Json> rejected;
    for (const auto& inst : instances) (inst.verdict.kept ? kept : rejected).push_back(to_json(inst));
    // Everything is computed before the first file is written.
    const auto stats = to_json(dataset_stats(instances)).dump(2) + "\n";
    write_file_atomic(a.out, to_jsonl(kept));
    if (!a.rejects.empty()) write_file_atomic(a.rejects, to_jsonl(rejected));
    if (!a.stats.empty()) write_file_atomic(a.stats, stats);
    std::cerr << "generated " << instances.size() << " instances, kept " << kept.size() << "\n";
    return 0;
}

struct MaskgenArgs {
    std::string in;
    std::string out;
};

int cmd_maskgen(const MaskgenArgs& a) {
    std::vector<Json> rows;
    const auto docs = read_jsonl(a.in);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto where = a.in + ":" + std::to_string(i + 1);
        // Lines may be datagen instances or bare conversations.
        Conversation conv;
        if (docs[i].is_object() && docs[i].contains("conversation")) {
            const auto inst = gen_instance_from_json(docs[i], where);
            if (!inst.verdict.kept) continue;
            conv = inst.conversation;
        } else {
            conv = conversation_from_json(docs[i], where);
        }
        try {
            rows.push_back(to_json(weight_mask(conv)));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), where);
        }
    }
    write_file_atomic(a.out, to_jsonl(rows));
    return 0;
}

struct ServeArgs {
    std::string pool;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string port_file;
    std::string tools;
    std::string knowledge;
    std::string log;
    std::string snapshot;
    std::string static_dir;
    std::uint64_t seed = 0;
    bool seeded = false;
    double k = 32.0;
    double initial = 1000.0;
};

int cmd_serve(const ServeArgs& a) {
    ToolRegistry registry;
    load_tools(registry, a.tools);
    KnowledgeStore knowledge;
    if (!a.knowledge.empty()) knowledge.ingest_directory(a.knowledge);

    ArenaOptions options;
    options.elo = {a.k, a.initial};
    if (a.seeded) options.seed = a.seed;
    if (!a.log.empty()) options.log_path = a.log;
    if (!a.snapshot.empty()) options.snapshot_path = a.snapshot;
    Arena arena(load_agent_pool(a.pool), &registry, &knowledge, options);
    ArenaServer server(arena, a.static_dir.empty() ? std::nullopt
                                                   : std::optional<std::filesystem::path>(a.static_dir));

    // Signals are taken by a dedicated thread; server threads inherit the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });

    int port = a.port;
    bool bound = true;
    if (port == 0) {
        port = server.bind_to_any_port(a.host);
        bound = port > 0;
    }
    if (!bound) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        throw Error(Errc::transport, "cannot bind", a.host);
    }
    if (!a.port_file.empty()) write_file_atomic(a.port_file, std::to_string(port) + "\n");
    std::cerr << "arena listening on http://" << a.host << ":" << port << "\n";
    const bool ok = a.port == 0 ? server.listen_after_bind() : server.listen(a.host, port);
    if (!ok) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        throw Error(Errc::transport, "cannot listen", a.host + ":" + std::to_string(port));
    }
    waiter.join();
    return 0;
}

int cmd_tools_list(const std::string& manifest, bool as_json) {
    ToolRegistry registry;
    load_tools(registry, manifest);
    if (as_json) {
        Json out = Json::array();
        for (const auto& s : registry.schemas()) out.push_back(to_json(s));
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& s : registry.schemas()) std::cout << s.name << "\t" << s.description << "\n";
    }
    return 0;
}

int cmd_tools_register(const std::string& manifest, const std::string& schema_file) {
    const auto doc = read_json_file(schema_file);
    auto incoming = tool_manifest_from_json(doc.is_array() ? doc : Json::array({doc}));
    std::vector<ToolSchema> tools;
    if (std::filesystem::exists(manifest)) tools = load_tool_manifest(manifest);
    for (auto& schema : incoming) {
        auto it = std::find_if(tools.begin(), tools.end(), [&](const auto& t) { return t.name == schema.name; });
        if (it != tools.end()) {
            *it = std::move(schema);
        } else {
            tools.push_back(std::move(schema));
        }
    }
    Json out = Json::array();
    for (const auto& t : tools) out.push_back(to_json(t));
    write_file_atomic(manifest, out.dump(2) + "\n");
    std::cerr << "manifest " << manifest << " now has " << tools.size() << " tools\n";
    return 0;
}

void print_error(std::string_view code, const std::string& message, const std::string& where) {
    Json err{{"code", code}, {"message", message}};
    if (!where.empty()) err["where"] = where;
    std::cerr << dump_compact(Json{{"error", std::move(err)}}) << "\n";
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Tool-using agent runtime: run agents, evaluate, generate data, host the arena."};
    app.name("agent");
    app.set_version_flag("--version", version);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file mirroring the flags, {\"<subcommand>\": {\"<flag>\": value}}")
        ->envname("AGENT_CONFIG");
    app.allow_config_extras(false);
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::function<int()> action;

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Answer one query with the tool-using agent");
    run_cmd->add_option("--query", run.query, "User instruction")->required();
    run_cmd->add_option("--backend", run.backend, "sim | scripted:<file> | http:<url>")->capture_default_str();
    run_cmd->add_option("--tools", run.tools, "Tool manifest (default: built-in mock tools)");
    run_cmd->add_option("--knowledge", run.knowledge, "Directory of knowledge documents")->check(CLI::ExistingDirectory);
    run_cmd->add_option("--system-prompt", run.system_prompt, "Override the system prompt");
    run_cmd->add_option("--max-iterations", run.max_iterations, "Tool-call budget")->check(CLI::PositiveNumber)->capture_default_str();
    run_cmd->add_option("--tool-top-k", run.tool_top_k, "Tools offered per prompt")->check(CLI::PositiveNumber)->capture_default_str();
    run_cmd->add_option("--knowledge-top-k", run.knowledge_top_k, "Knowledge chunks per prompt")->capture_default_str();
    run_cmd->add_option("--context-tokens", run.context_tokens, "Model context size")->capture_default_str();
    run_cmd->add_option("--max-new-tokens", run.max_new_tokens, "Reserved for generation")->capture_default_str();
    run_cmd->add_flag("--no-tools", run.no_tools, "Disable tool use");
    run_cmd->add_flag("--retrieve-each-step", run.retrieve_each_step, "Re-rank tools after every tool call");
    run_cmd->add_flag("--answer-only", run.answer_only, "Print only the final answer");
    run_cmd->add_option("--out", run.out, "Write the run record here instead of stdout");
    run_cmd->callback([&] { action = [&] { return cmd_run(run); }; });

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Score predicted conversations against gold");
    eval_cmd->add_option("--gold", ev.gold, "Gold conversations (JSONL)")->required();
    eval_cmd->add_option("--pred", ev.pred, "Predicted conversations (JSONL)")->required();
    eval_cmd->add_flag("--micro", ev.micro, "Pool argument counts before computing F1");
    eval_cmd->add_option("--report,--out", ev.out, "Write the report here instead of stdout");
    eval_cmd->callback([&] { action = [&] { return cmd_eval(ev); }; });

    DatagenArgs dg;
    auto* datagen_cmd = app.add_subcommand("datagen", "Generate and filter synthetic dialogues");
    datagen_cmd->add_option("--apis", dg.apis, "API catalog (JSON)")->required();
    datagen_cmd->add_option("--n", dg.n, "Instances to generate")->required()->check(CLI::PositiveNumber);
    datagen_cmd->add_option("--out", dg.out, "Kept instances (JSONL)")->required();
    datagen_cmd->add_option("--stats", dg.stats, "Dataset statistics (JSON)");
    datagen_cmd->add_option("--rejects", dg.rejects, "Filtered instances (JSONL)");
    datagen_cmd->add_option("--seed", dg.seed, "Sampling seed")->capture_default_str();
    datagen_cmd->add_option("--max-steps", dg.max_steps, "Tool calls allowed per user turn")->capture_default_str();
    datagen_cmd->add_option("--max-user-turns", dg.max_user_turns, "User turns per dialogue")->capture_default_str();
    datagen_cmd->add_option("--apis-per-instance", dg.apis_per_instance, "APIs offered per dialogue")->capture_default_str();
    datagen_cmd->add_option("--user-backend", dg.user_backend, "Backend playing the user")->capture_default_str();
    datagen_cmd->add_option("--agent-backend", dg.agent_backend, "Backend playing the agent")->capture_default_str();
    datagen_cmd->add_option("--api-backend", dg.api_backend, "Backend playing the APIs")->capture_default_str();
    datagen_cmd->callback([&] { action = [&] { return cmd_datagen(dg); }; });

    MaskgenArgs mg;
    auto* maskgen_cmd = app.add_subcommand("maskgen", "Emit weighted token masks for training");
    maskgen_cmd->add_option("--in", mg.in, "Conversations or datagen instances (JSONL)")->required();
    maskgen_cmd->add_option("--out", mg.out, "Weighted samples (JSONL)")->required();
    maskgen_cmd->callback([&] { action = [&] { return cmd_maskgen(mg); }; });

    ServeArgs sv;
    auto* serve_cmd = app.add_subcommand("serve-arena", "Host the arena HTTP service");
    serve_cmd->add_option("--pool", sv.pool, "Agent pool (JSON)")->required();
    serve_cmd->add_option("--host", sv.host, "Bind address")->capture_default_str();
    serve_cmd->add_option("--port", sv.port, "Port, 0 for any free port")->check(CLI::Range(0, 65535))->capture_default_str();
    serve_cmd->add_option("--port-file", sv.port_file, "Write the bound port here");
    serve_cmd->add_option("--tools", sv.tools, "Tool manifest (default: built-in mock tools)");
    serve_cmd->add_option("--knowledge", sv.knowledge, "Directory of knowledge documents")->check(CLI::ExistingDirectory);
    serve_cmd->add_option("--log", sv.log, "Append-only battle log (JSONL), replayed on start");
    serve_cmd->add_option("--snapshot", sv.snapshot, "Rating table snapshot (JSON)");
    serve_cmd->add_option("--static", sv.static_dir, "Serve a web front end from this directory")->check(CLI::ExistingDirectory);
    auto* seed_opt = serve_cmd->add_option("--seed", sv.seed, "Pair-sampling seed");
    serve_cmd->add_option("--k", sv.k, "Elo K-factor")->capture_default_str();
    serve_cmd->add_option("--initial", sv.initial, "Initial rating")->capture_default_str();
    serve_cmd->callback([&] {
        sv.seeded = seed_opt->count() > 0;
        action = [&] { return cmd_serve(sv); };
    });

    auto* tools_cmd = app.add_subcommand("tools", "Inspect or edit tool manifests");
    tools_cmd->require_subcommand(1);
    std::string list_manifest;
    bool list_json = false;
    auto* list_cmd = tools_cmd->add_subcommand("list", "List registered tools");
    list_cmd->add_option("--tools", list_manifest, "Tool manifest (default: built-in mock tools)");
    list_cmd->add_flag("--json", list_json, "Print schemas as JSON");
    list_cmd->callback([&] { action = [&] { return cmd_tools_list(list_manifest, list_json); }; });
    std::string reg_manifest;
    std::string reg_schema;
    auto* register_cmd = tools_cmd->add_subcommand("register", "Add or replace tools in a manifest");
    register_cmd->add_option("--tools", reg_manifest, "Manifest to update (created if missing)")->required();
    register_cmd->add_option("--schema", reg_schema, "Schema object or array (JSON)")->required();
    register_cmd->callback([&] { action = [&] { return cmd_tools_register(reg_manifest, reg_schema); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return action ? action() : 2;
    } catch (const Error& e) {
        print_error(errc_name(e.code()), e.what(), e.where());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what(), {});
        return 1;
    }
}

} // namespace toolagent
