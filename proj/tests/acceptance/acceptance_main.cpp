// SPDX-License-Identifier: Apache-2.0
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "toolagent/arena.hpp"
#include "toolagent/eval.hpp"
#include "toolagent/executor.hpp"
#include "toolagent/io.hpp"
#include "toolagent/testing/mock_servers.hpp"
#include "toolagent/tokenizer.hpp"
#include "toolagent/trainprep.hpp"

using namespace toolagent;
using Clock = std::chrono::steady_clock;

namespace {

const std::filesystem::path data_dir = TOOLAGENT_DATA_DIR;

struct CriterionResult {
    bool ok = true;
    std::string detail;
};

// Collects the first few failures of one criterion.
class Check {
public:
    void expect(bool cond, const std::string& what) {
        if (cond) return;
        ++failures_;
        if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
    }
    [[nodiscard]] CriterionResult result(std::string summary) const {
        if (failures_ == 0) return {true, std::move(summary)};
        return {false, std::to_string(failures_) + " failure(s): " + notes_};
    }

private:
    std::size_t failures_ = 0;
    std::string notes_;
};

// ---------------------------------------------------------------------------
// ROUGE-L against brute-force LCS

std::size_t naive_lcs(const std::vector<std::uint32_t>& a, std::size_t i, const std::vector<std::uint32_t>& b,
                      std::size_t j) {
    if (i == a.size() || j == b.size()) return 0;
    if (a[i] == b[j]) return 1 + naive_lcs(a, i + 1, b, j + 1);
    return std::max(naive_lcs(a, i + 1, b, j), naive_lcs(a, i, b, j + 1));
}

double rouge_definition(std::size_t lcs, std::size_t m, std::size_t n) {
    if (m == 0 || n == 0 || lcs == 0) return 0.0;
    const double r = static_cast<double>(lcs) / static_cast<double>(m);
    const double p = static_cast<double>(lcs) / static_cast<double>(n);
    return 2.0 * r * p / (r + p);
}

struct SeqNode {
    std::vector<std::uint32_t> seq;
    std::size_t depth = 0;
};

// Every sequence of length <= max_len over {0..alphabet-1}, in DFS preorder
// so each node's parent is the nearest earlier node one level up.
std::vector<SeqNode> all_sequences(std::size_t max_len, std::uint32_t alphabet) {
    std::vector<SeqNode> out;
    std::vector<std::uint32_t> cur;
    std::function<void()> walk = [&] {
        out.push_back({cur, cur.size()});
        if (cur.size() == max_len) return;
        for (std::uint32_t c = 0; c < alphabet; ++c) {
            cur.push_back(c);
            walk();
            cur.pop_back();
        }
    };
    walk();
    return out;
}

CriterionResult rouge_exhaustive() {
    const auto start = Clock::now();
    const auto seqs = all_sequences(8, 3);
    Check check;
    check.expect(seqs.size() == 9841, "expected 9841 sequences");

    // The memoized oracle must agree with plain recursion on the short ones.
    for (const auto& a : seqs) {
        if (a.depth > 5) continue;
        for (const auto& b : seqs) {
            if (b.depth > 5) continue;
            std::vector<std::size_t> prev(a.depth + 1, 0), cur(a.depth + 1, 0);
            for (auto c : b.seq) {
                for (std::size_t i = 1; i <= a.depth; ++i) {
                    cur[i] = a.seq[i - 1] == c ? prev[i - 1] + 1 : std::max(prev[i], cur[i - 1]);
                }
                std::swap(prev, cur);
            }
            check.expect(prev[a.depth] == naive_lcs(a.seq, 0, b.seq, 0), "table and recursion disagree");
        }
    }

    const auto table_checked = Clock::now();
    std::size_t pairs = 0;
    std::array<std::array<std::size_t, 9>, 9> rows{};
    for (const auto& a : seqs) {
        const auto m = a.depth;
        for (const auto& b : seqs) {
            // rows[d] holds the LCS row of `a` against b's prefix of length d;
            // preorder means rows[depth - 1] is b's parent.
            if (b.depth > 0) {
                const auto c = b.seq.back();
                const auto& up = rows[b.depth - 1];
                auto& row = rows[b.depth];
                for (std::size_t i = 1; i <= m; ++i) {
                    row[i] = a.seq[i - 1] == c ? up[i - 1] + 1 : std::max(up[i], row[i - 1]);
                }
            }
            const auto expected = rouge_definition(rows[b.depth][m], m, b.depth);
            const auto got = rouge_l_ids(a.seq, b.seq);
            if (got != expected) check.expect(false, "rouge_l_ids mismatch");
            ++pairs;
        }
    }

    const auto exhaustive_done = Clock::now();
    // Same check through the text path for short sequences.
    const char* words[] = {"x", "y", "z"};
    auto text = [&](const std::vector<std::uint32_t>& s) {
        std::string out;
        for (auto c : s) out += std::string(out.empty() ? "" : " ") + words[c];
        return out;
    };
    for (const auto& a : seqs) {
        if (a.depth > 4) continue;
        for (const auto& b : seqs) {
            if (b.depth > 4) continue;
            check.expect(rouge_l(text(a.seq), text(b.seq)) ==
                             rouge_definition(naive_lcs(a.seq, 0, b.seq, 0), a.depth, b.depth),
                         "rouge_l text mismatch");
        }
    }

    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    check.expect(secs < 10.0, "took " + std::to_string(secs) + " s");
    std::ostringstream s;
    auto since = [](Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
    s << pairs << " pairs exact, " << secs << " s (table " << since(start, table_checked) << ", exhaustive "
      << since(table_checked, exhaustive_done) << ", text " << since(exhaustive_done, Clock::now()) << ")";
    return check.result(s.str());
}

// ---------------------------------------------------------------------------
// Argument F1 against a direct reading of the formulas

double f1_reference(const ApiRequest& gold, const ApiRequest& pred) {
    const double a = static_cast<double>(gold.arguments.size());
    const double a_star = static_cast<double>(pred.arguments.size());
    if (a == 0 && a_star == 0) return 1.0;
    if (a == 0 || a_star == 0) return 0.0;
    double hm = 0, fm = 0;
    for (const auto& [name, value] : gold.arguments) {
        auto it = pred.arguments.find(name);
        if (it == pred.arguments.end()) continue;
        (argument_values_equal(value, it->second) ? fm : hm) += 1;
    }
    const double r = (0.5 * hm + fm) / a;
    const double p = (0.5 * hm + fm) / a_star;
    if (r + p == 0) return 0.0;
    return 2 * (r * p) / (r + p);
}

CriterionResult f1_oracle() {
    Check check;
    auto req = [](ArgumentMap args) { return ApiRequest{"t", std::move(args)}; };
    auto near = [](double x, double y) { return std::abs(x - y) <= 1e-12; };
    check.expect(near(argument_f1(req({{"text", "cat"}, {"resolution", "1024"}}), req({{"text", "cat"}, {"resolution", "512"}})), 0.75),
                 "0.75 example");
    check.expect(near(argument_f1(req({{"text", "cat"}}), req({{"text", "cat"}, {"style", "oil"}})), 2.0 / 3.0), "2/3 example");
    check.expect(argument_f1(req({{"text", "cat"}}), req({{"text", "cat"}})) == 1.0, "identity example");
    check.expect(argument_f1(req({{"text", "cat"}}), req({})) == 0.0, "empty prediction example");

    std::mt19937_64 rng(2024);
    const std::vector<std::string> names{"text", "style", "resolution", "period", "instance_id", "lang"};
    const std::vector<std::string> values{"cat", "dog", "1024", "1024.0", "512", " cat", "12", "oil", ""};
    auto random_args = [&] {
        ArgumentMap m;
        const auto n = std::uniform_int_distribution<int>(0, 5)(rng);
        for (int i = 0; i < n; ++i) {
            m[names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)]] =
                values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)];
        }
        return m;
    };
    for (int i = 0; i < 200; ++i) {
        const auto g = req(random_args());
        const auto p = req(random_args());
        check.expect(near(argument_f1(g, p), f1_reference(g, p)), "random pair " + std::to_string(i));
    }
    return check.result("4 worked examples and 200 random pairs within 1e-12");
}

// ---------------------------------------------------------------------------
// Perfect agent over the bundled mini test set

void load_manifest_tools(ToolRegistry& registry) {
    register_default_handlers(registry);
    std::set<std::string> builtin;
    for (const auto& s : default_tool_schemas()) builtin.insert(s.name);
    for (auto schema : load_tool_manifest(data_dir / "tools.json")) {
        if (!builtin.contains(schema.endpoint.target)) {
            registry.register_handler(schema.endpoint.target,
                                      [](const ApiRequest& r) { return dump_compact(to_json(r)); });
        }
        registry.register_tool(std::move(schema));
    }
}

// Replays the gold assistant turns through the agent loop, one user turn at a time.
Conversation replay_gold(const Conversation& gold, const ToolRegistry& registry) {
    std::vector<std::string> script;
    for (const auto& m : gold.messages) {
        if (m.role == Role::assistant) script.push_back(m.content);
    }
    ScriptedBackend llm(script);
    AgentOptions options;
    options.conversation_id = gold.id;
    Agent agent(llm, &registry, nullptr, options);
    std::optional<Conversation> conv;
    for (const auto& m : gold.messages) {
        if (m.role != Role::user) continue;
        auto record = agent.run(m.content, conv ? &*conv : nullptr);
        conv = std::move(record.conversation);
    }
    return *conv;
}

CriterionResult perfect_agent() {
    Check check;
    const auto gold = read_conversations_jsonl(data_dir / "eval" / "mini_test.jsonl");
    check.expect(gold.size() == 20, "mini test set has " + std::to_string(gold.size()) + " conversations");
    ToolRegistry registry;
    load_manifest_tools(registry);
    std::vector<Conversation> preds;
    for (const auto& g : gold) preds.push_back(replay_gold(g, registry));
    const auto report = evaluate(gold, preds);
    check.expect(report.action_em == 100.0, "EM " + std::to_string(report.action_em));
    check.expect(report.argument_f1 == 100.0, "F1 " + std::to_string(report.argument_f1));
    check.expect(report.rouge_l == 100.0, "ROUGE-L " + std::to_string(report.rouge_l));

    // Flip k of the n gold requests' names in the predictions.
    const auto n = report.requests;
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t c = 0; c < preds.size(); ++c) {
        for (std::size_t m = 0; m < preds[c].messages.size(); ++m) {
            if (preds[c].messages[m].request) slots.emplace_back(c, m);
        }
    }
    check.expect(slots.size() == n, "prediction request count");
    std::mt19937_64 rng(77);
    for (std::size_t k = 0; k <= n; ++k) {
        auto corrupted = preds;
        auto order = slots;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < k; ++i) {
            corrupted[order[i].first].messages[order[i].second].request->api_name += "-flipped";
        }
        const auto em = evaluate(gold, corrupted).action_em;
        const double expected = 100.0 * static_cast<double>(n - k) / static_cast<double>(n);
        check.expect(em == expected, "k=" + std::to_string(k) + " gave " + std::to_string(em));
    }
    std::ostringstream s;
    s << "EM/F1/ROUGE-L = 100/100/100 over " << gold.size() << " conversations; corruption k=0.." << n << " exact";
    return check.result(s.str());
}

// ---------------------------------------------------------------------------
// Retrieval contract

CriterionResult retrieval_contract() {
    Check check;
    std::mt19937_64 rng(31337);
    std::vector<std::string> vocab;
    for (int i = 0; i < 300; ++i) vocab.push_back("w" + std::to_string(i));
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = std::uniform_int_distribution<int>(1, 50)(rng);
        std::vector<ToolSchema> tools;
        for (int i = 0; i < n; ++i) {
            std::string desc = "unique" + std::to_string(trial) + "x" + std::to_string(i);
            const auto words = std::uniform_int_distribution<int>(0, 8)(rng);
            for (int w = 0; w < words; ++w) {
                desc += " " + vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)];
            }
            tools.push_back(ToolSchema{"tool-" + std::to_string(i), desc, {}, Endpoint::local("none")});
        }
        ToolRegistry forward;
        ToolRegistry backward;
        for (const auto& t : tools) forward.register_tool(t);
        for (auto it = tools.rbegin(); it != tools.rend(); ++it) backward.register_tool(*it);

        const auto target = std::uniform_int_distribution<std::size_t>(0, tools.size() - 1)(rng);
        const auto hits = forward.retrieve(tools[target].description, 3);
        check.expect(hits.size() == std::min<std::size_t>(3, n), "hit count");
        for (std::size_t i = 1; i < hits.size(); ++i) check.expect(hits[i - 1].score >= hits[i].score, "unsorted");
        check.expect(!hits.empty() && hits[0].tool_name == tools[target].name, "description query not first");
        check.expect(hits == forward.retrieve(tools[target].description, 3), "repeat differs");
        check.expect(hits == backward.retrieve(tools[target].description, 3), "insertion order changed result");

        std::string query;
        for (int w = 0; w < 3; ++w) query += vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)] + " ";
        const auto random_hits = forward.retrieve(query, 3);
        check.expect(random_hits.size() == std::min<std::size_t>(3, n), "random query hit count");
        check.expect(random_hits == backward.retrieve(query, 3), "random query not deterministic");
    }
    return check.result("1000 trials, n <= 50, description query ranked first every time");
}

// ---------------------------------------------------------------------------
// Executor determinism and bounds

CriterionResult executor_bounds() {
    Check check;
    ToolRegistry registry;
    register_default_tools(registry);
    std::atomic<int> executed{0};
    registry.register_handler("counter", [&](const ApiRequest&) {
        ++executed;
        return std::string("counted");
    });
    registry.register_tool(ToolSchema{"counter", "Count one more call", {}, Endpoint::local("counter")});

    const std::vector<std::string> script{
        "Drawing.\n" + format_action({"text-to-image", {{"text", "a logo of agent"}}}),
        "Here is the logo of agent."};
    std::string first;
    for (int i = 0; i < 5; ++i) {
        ScriptedBackend llm(script);
        const auto text = dump_compact(to_json(Agent(llm, &registry, nullptr).run("Draw a logo image of agent")));
        if (i == 0) first = text;
        check.expect(text == first, "run " + std::to_string(i) + " differs");
    }

    ScriptedBackend forever({format_action({"counter", {}})}, {}, true);
    AgentOptions options;
    options.max_iterations = 5;
    const auto record = Agent(forever, &registry, nullptr, options).run("keep counting");
    check.expect(executed == 5, "executed " + std::to_string(executed.load()) + " tools");
    check.expect(record.steps_taken == 5, "steps_taken");
    check.expect(record.terminated_by == Termination::step_limit, "termination");

    testing::MockToolServer server([](const std::string&, const Json&) {
        return testing::MockReply{200, R"({"status":"ok","expires":"2027-10-16"})"};
    });
    ToolRegistry remote;
    remote.register_tool(ToolSchema{"renew-ecs", "Renew an ECS instance",
                                    {{"instance_id", "", true}, {"period", "", true}},
                                    Endpoint::remote(server.url_for("renew-ecs"))});
    auto renew = ScriptedBackend::from_file(data_dir / "scripts" / "renew_ecs.json");
    const auto renewal = Agent(*renew, &remote, nullptr).run("Please renew ECS instance i-rj90a7e840y5cde for 12 months");
    const auto calls = server.calls();
    check.expect(calls.size() == 1, "renew-ecs called " + std::to_string(calls.size()) + " times");
    check.expect(!calls.empty() && calls[0].arguments == Json{{"instance_id", "i-rj90a7e840y5cde"}, {"period", "12"}},
                 "renew-ecs arguments");
    check.expect(renewal.terminated_by == Termination::final_answer, "renewal did not finish");
    return check.result("5 identical runs, 5 of 5 calls under the cap, renew-ecs called once");
}

// ---------------------------------------------------------------------------
// Weighted mask partition

CriterionResult mask_partition() {
    Check check;
    std::mt19937_64 rng(500);
    const std::vector<std::string> pool{"the", "cat", "画", "图片", "ok", "42", "x-y", "emoji😀", "naïve"};
    auto words = [&](int lo, int hi) {
        std::string s;
        const auto n = std::uniform_int_distribution<int>(lo, hi)(rng);
        for (int i = 0; i < n; ++i) s += (i ? " " : "") + pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        return s;
    };
    for (int trial = 0; trial < 500; ++trial) {
        Conversation conv{"m" + std::to_string(trial), {}};
        std::vector<std::uint8_t> expected;
        auto add = [&](const std::string& text, std::uint8_t w) { expected.insert(expected.end(), count_tokens(text), w); };
        if (trial % 2) {
            conv.messages.push_back(Message::system(words(0, 5)));
            add(conv.messages.back().content, 0);
        }
        const auto turns = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int t = 0; t < turns; ++t) {
            conv.messages.push_back(Message::user(words(1, 6)));
            add(conv.messages.back().content, 0);
            const auto calls = std::uniform_int_distribution<int>(0, 2)(rng);
            for (int c = 0; c < calls; ++c) {
                ApiRequest req{pool[std::uniform_int_distribution<std::size_t>(0, 4)(rng)], {{"text", words(0, 4)}}};
                // Pieces are newline-separated, so their token counts add up.
                const auto prose = words(0, 4);
                const auto action = format_action(req);
                const auto tail = words(0, 3);
                std::string content = prose;
                if (!prose.empty()) content += "\n";
                content += action;
                if (!tail.empty()) content += "\n" + tail;
                conv.messages.push_back(Message::assistant(content, req));
                add(prose, 1);
                add(action, 2);
                add(tail, 1);
                conv.messages.push_back(Message::tool(ApiResult::success(req.api_name, words(0, 5))));
                add(conv.messages.back().content, 0);
            }
            conv.messages.push_back(Message::assistant(words(0, 6)));
            add(conv.messages.back().content, 1);
        }
        const auto sample = weight_mask(conv);
        check.expect(sample.tokens.size() == sample.weights.size(), "tokens and weights differ in length");
        check.expect(sample.weights == expected, "trial " + std::to_string(trial) + " weights");
    }
    return check.result("500 conversations, weights match construction");
}

// ---------------------------------------------------------------------------
// Datagen filter injection

CriterionResult filter_injection() {
    Check check;
    const auto catalog = load_catalog(data_dir / "catalog.json");
    std::vector<ToolSchema> schemas;
    for (const auto& e : catalog) schemas.push_back(e.schema);
    std::mt19937_64 rng(80);
    auto pick = [&] { return schemas[std::uniform_int_distribution<std::size_t>(0, schemas.size() - 1)(rng)]; };
    auto valid_call = [](const ToolSchema& s) {
        ApiRequest r{s.name, {}};
        for (const auto& p : s.parameters) {
            if (p.required) r.arguments[p.name] = "value";
        }
        return r;
    };
    auto instance = [&](const std::vector<ToolSchema>& offered, const std::string& assistant, std::optional<ApiRequest> req) {
        GenInstance inst;
        inst.conversation.id = "inj";
        inst.apis_offered = offered;
        inst.conversation.messages = {Message::user("please help")};
        inst.conversation.messages.push_back(Message::assistant(assistant, req));
        if (req) {
            inst.conversation.messages.push_back(Message::tool(ApiResult::success(req->api_name, "{}")));
            inst.conversation.messages.push_back(Message::assistant("done"));
        }
        return inst;
    };

    struct Case {
        GenInstance inst;
        std::optional<FilterReason> expect;
    };
    std::vector<Case> cases;
    for (int i = 0; i < 80; ++i) {
        const auto s = pick();
        if (i % 5 == 0) {
            cases.push_back({instance({s}, "No tool is needed for that.", std::nullopt), std::nullopt});
        } else {
            auto r = valid_call(s);
            cases.push_back({instance({s}, "Calling.\n" + format_action(r), r), std::nullopt});
        }
    }
    for (int i = 0; i < 10; ++i) {
        const auto s = pick();
        ApiRequest r = valid_call(s);
        if (i % 2) {
            r.api_name = "imagine-api-" + std::to_string(i);
        } else {
            r.arguments["made_up_argument"] = "x";
        }
        cases.push_back({instance({s}, format_action(r), r), FilterReason::hallucinated_name});
    }
    for (int i = 0; i < 10; ++i) {
        const auto s = pick();
        if (i % 2) {
            cases.push_back({instance({s}, "ACTION: {\"api_name\": \"" + s.name + "\", \"parameters\": {", std::nullopt),
                             FilterReason::illegal_request});
        } else {
            ApiRequest r = valid_call(s);
            r.arguments.clear();
            cases.push_back({instance({s}, format_action(r), r), FilterReason::illegal_request});
        }
    }
    std::shuffle(cases.begin(), cases.end(), rng);

    std::size_t filtered = 0, clean_filtered = 0, wrong_reason = 0;
    for (auto& c : cases) {
        const auto offered = c.inst.apis_offered;
        const auto out = filter_instance(std::move(c.inst), offered);
        if (!out.verdict.kept) ++filtered;
        if (!c.expect && !out.verdict.kept) ++clean_filtered;
        if (c.expect && (out.verdict.kept || out.verdict.reason != *c.expect)) ++wrong_reason;
    }
    check.expect(filtered == 20, std::to_string(filtered) + " filtered");
    check.expect(clean_filtered == 0, std::to_string(clean_filtered) + " clean instances filtered");
    check.expect(wrong_reason == 0, std::to_string(wrong_reason) + " wrong reasons");
    return check.result("20 of 100 filtered with correct reasons, 0 clean lost");
}

// ---------------------------------------------------------------------------
// Elo

ArenaAgent scripted_agent(const std::string& id) {
    ArenaAgent a;
    a.id = id;
    a.backend_spec = "scripted";
    a.backend = std::make_unique<ScriptedBackend>(std::vector<std::string>{"reply from " + id}, LlmConfig{}, true);
    return a;
}

CriterionResult elo_properties() {
    Check check;
    RatingTable table;
    std::mt19937_64 rng(10000);
    const std::size_t players = 12;
    for (int i = 0; i < 10'000; ++i) {
        const auto a = std::uniform_int_distribution<std::size_t>(0, players - 1)(rng);
        auto b = std::uniform_int_distribution<std::size_t>(0, players - 2)(rng);
        if (b >= a) ++b;
        const auto o = std::uniform_int_distribution<int>(0, 2)(rng);
        record_result(table, "p" + std::to_string(a), "p" + std::to_string(b),
                      o == 0 ? toolagent::Outcome::a_wins : o == 1 ? toolagent::Outcome::b_wins : toolagent::Outcome::tie);
    }
    const double drift = std::abs(table.rating_sum() - 1000.0 * static_cast<double>(table.ratings.size()));
    check.expect(drift <= 1e-9, "sum drift " + std::to_string(drift));

    RatingTable fresh;
    record_result(fresh, "a", "b", toolagent::Outcome::a_wins);
    check.expect(fresh.rating("a") == 1016.0 && fresh.rating("b") == 984.0, "1000/1000 win case");

    const auto dir = std::filesystem::temp_directory_path() / ("toolagent-acceptance-" + std::to_string(rng()));
    std::filesystem::create_directories(dir);
    {
        ToolRegistry tools;
        register_default_tools(tools);
        std::vector<ArenaAgent> pool;
        for (int i = 0; i < 4; ++i) pool.push_back(scripted_agent("agent-" + std::to_string(i)));
        ArenaOptions options;
        options.seed = 9;
        options.log_path = dir / "battles.jsonl";
        Arena arena(std::move(pool), &tools, nullptr, options);
        for (int i = 0; i < 200; ++i) {
            const auto battle = arena.start_battle("task");
            const auto o = std::uniform_int_distribution<int>(0, 2)(rng);
            (void)arena.vote(battle.battle_id, o == 0   ? toolagent::Outcome::a_wins
                                               : o == 1 ? toolagent::Outcome::b_wins
                                                        : toolagent::Outcome::tie);
        }
        check.expect(replay(BattleLog(dir / "battles.jsonl").entries()) == arena.table(), "log replay differs");
    }
    std::filesystem::remove_all(dir);
    std::ostringstream s;
    s << "10000 battles, drift " << drift << "; 1016/984; 200-battle log replays bit-exactly";
    return check.result(s.str());
}

// ---------------------------------------------------------------------------
// Suite wall time: this binary plus the unit test binary.

CriterionResult suite_time(Clock::time_point started) {
    Check check;
    const auto unit_start = Clock::now();
    const std::string cmd = std::string("\"") + TOOLAGENT_UNIT_TESTS + "\" > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    const double unit = std::chrono::duration<double>(Clock::now() - unit_start).count();
    const double total = std::chrono::duration<double>(Clock::now() - started).count();
    check.expect(rc == 0, "unit tests failed");
    check.expect(total < 60.0, "took " + std::to_string(total) + " s");
    std::ostringstream s;
    s << "acceptance + unit tests in " << total << " s (unit " << unit << " s)";
    return check.result(s.str());
}

} // namespace

int main() {
    const auto started = Clock::now();
    const std::vector<std::pair<std::string, std::function<CriterionResult()>>> criteria{
        {"metric oracle equivalence (ROUGE-L exhaustive)", rouge_exhaustive},
        {"argument F1 hand-oracle suite", f1_oracle},
        {"perfect-agent evaluation and corruption harness", perfect_agent},
        {"retrieval contract", retrieval_contract},
        {"executor determinism and bounds", executor_bounds},
        {"weighted-mask partition", mask_partition},
        {"datagen filter injection", filter_injection},
        {"Elo properties", elo_properties},
        {"full primary suite under 60 s", [&] { return suite_time(started); }},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        CriterionResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (r.ok ? "PASS" : "FAIL") << "  " << name << "  (" << r.detail << ")" << std::endl;
        failed += r.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
