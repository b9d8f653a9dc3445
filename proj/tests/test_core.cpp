// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>

#include "test_support.hpp"
#include "toolagent/io.hpp"
#include "toolagent/tokenizer.hpp"

using namespace toolagent;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected toolagent::Error");
    return Errc::io;
}

} // namespace

TEST_SUITE("core") {

TEST_CASE("empty conversation serializes to the canonical document and back") {
    Conversation c{"c0", {}};
    CHECK(serialize_conversation(c) == R"({"id":"c0","messages":[]})");
    CHECK(parse_conversation(serialize_conversation(c)) == c);
}

TEST_CASE("two-message conversation round-trips") {
    Conversation c{"c1", {Message::user("hi"), Message::assistant("hello")}};
    CHECK(parse_conversation(serialize_conversation(c)) == c);
}

TEST_CASE("argument order in the document does not matter") {
    const auto a = parse_conversation(
        R"({"id":"x","messages":[{"role":"user","content":"go"},{"role":"assistant","content":"ACTION: {}","request":{"api_name":"t","parameters":{"b":"2","a":"1"}}}]})");
    const auto b = parse_conversation(
        R"({"id":"x","messages":[{"role":"user","content":"go"},{"role":"assistant","content":"ACTION: {}","request":{"api_name":"t","parameters":{"a":"1","b":"2"}}}]})");
    CHECK(a == b);
    CHECK(serialize_conversation(a) == serialize_conversation(b));
}

TEST_CASE("round trip holds for generated conversations") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto c = test::random_conversation(rng, "gen-" + std::to_string(i));
        REQUIRE_NOTHROW(validate(c));
        const auto text = serialize_conversation(c);
        CHECK(parse_conversation(text) == c);
        CHECK(serialize_conversation(parse_conversation(text)) == text);
    }
}

TEST_CASE("consecutive user turns are rejected with the message index") {
    try {
        (void)parse_conversation(
            R"({"id":"x","messages":[{"role":"user","content":"a"},{"role":"user","content":"b"}]})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invariant_violation);
        CHECK(e.where() == "messages[1]");
    }
}

TEST_CASE("truncated and ill-typed documents are malformed, never fatal") {
    CHECK(code_of([] { (void)parse_conversation(R"({"id":"x","messages":[{"role":)"); }) == Errc::malformed_document);
    CHECK(code_of([] { (void)parse_conversation("[]"); }) == Errc::malformed_document);
    CHECK(code_of([] { (void)parse_conversation(R"({"id":"x","messages":[{"role":"robot","content":""}]})"); }) ==
          Errc::malformed_document);
    try {
        (void)parse_conversation(R"({"id":"x","messages":[{"role":"user","content":5}]})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.where() == "$.messages[0].content");
    }
}

TEST_CASE("mutated documents fail with structured errors only") {
    std::mt19937_64 rng(5);
    const auto text = serialize_conversation(test::random_conversation(rng, "m"));
    for (int i = 0; i < 500; ++i) {
        auto doc = text;
        const auto pos = std::uniform_int_distribution<std::size_t>(0, doc.size() - 1)(rng);
        doc[pos] = "{}[]\",:x0 "[std::uniform_int_distribution<int>(0, 9)(rng)];
        try {
            (void)parse_conversation(doc);
        } catch (const Error&) {
        }
    }
}

TEST_CASE("placement rules") {
    Conversation request_on_user{"x", {Message::user("a")}};
    request_on_user.messages[0].request = ApiRequest{"t", {}};
    CHECK(code_of([&] { validate(request_on_user); }) == Errc::invariant_violation);

    Conversation starts_with_assistant{"x", {Message::system("s"), Message::assistant("a")}};
    CHECK(code_of([&] { validate(starts_with_assistant); }) == Errc::invariant_violation);

    Conversation chain{"x", {Message::user("a"), Message::assistant("b", ApiRequest{"t", {}}),
                             Message::tool(ApiResult::success("t", "r")), Message::assistant("c")}};
    CHECK_NOTHROW(validate(chain));
}

TEST_CASE("schema validation") {
    ToolSchema ok{"renew-ecs", "Renew an instance", {{"instance_id", "", true}, {"period", "", true}}, {}};
    CHECK_NOTHROW(validate(ok));
    auto dup = ok;
    dup.parameters.push_back({"period", "again", false});
    CHECK(code_of([&] { validate(dup); }) == Errc::invalid_schema);
    auto unnamed = ok;
    unnamed.name.clear();
    CHECK(code_of([&] { validate(unnamed); }) == Errc::invalid_schema);
    auto undescribed = ok;
    undescribed.description.clear();
    CHECK(code_of([&] { validate(undescribed); }) == Errc::invalid_schema);
}

TEST_CASE("endpoints") {
    CHECK(Endpoint::parse("local:echo") == Endpoint::local("echo"));
    CHECK(Endpoint::parse("http://127.0.0.1:9/tools/x") == Endpoint::remote("http://127.0.0.1:9/tools/x"));
    CHECK(Endpoint::local("echo").to_string() == "local:echo");
    const auto schema = tool_schema_from_json(Json{{"name", "t"}, {"description", "d"}});
    CHECK(schema.endpoint == Endpoint::local("t"));
}

TEST_CASE("non-string argument values keep their JSON spelling") {
    const auto req = api_request_from_json(Json::parse(R"({"api_name":"t","parameters":{"n":3,"ok":true,"s":"x"}})"));
    CHECK(req.arguments.at("n") == "3");
    CHECK(req.arguments.at("ok") == "true");
    CHECK(req.arguments.at("s") == "x");
}

} // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("atomic write replaces the whole file and leaves no temporary") {
    test::TempDir dir;
    const auto path = dir / "out.json";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    CHECK(read_file(path) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
    CHECK(entries == 1);
}

TEST_CASE("jsonl errors name the file and line") {
    test::TempDir dir;
    const auto path = dir / "bad.jsonl";
    write_file_atomic(path, "{\"a\":1}\n\n{oops\n");
    try {
        (void)read_jsonl(path);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::malformed_document);
        CHECK(e.where() == path.string() + ":3");
    }
    CHECK(code_of([&] { (void)read_file(dir / "missing"); }) == Errc::io);
}

TEST_CASE("bundled data files load") {
    const auto tools = load_tool_manifest(test::data_dir() / "tools.json");
    CHECK(tools.size() == 15);
    const auto convs = read_conversations_jsonl(test::data_dir() / "eval" / "mini_test.jsonl");
    CHECK(convs.size() == 20);
}

} // TEST_SUITE

TEST_SUITE("tokenizer") {

TEST_CASE("counting examples") {
    CHECK(count_tokens("") == 0);
    CHECK(count_tokens("a b c") == 3);
    CHECK(count_tokens("今天天气") == 4);
    CHECK(count_tokens("  leading and trailing \n") == 3);
    CHECK(tokenize("画a cat图") == std::vector<std::string>{"画", "a", "cat", "图"});
    CHECK(count_tokens("a　b") == 2);  // ideographic space separates
}

TEST_CASE("invalid UTF-8 never throws and counts as word bytes") {
    const std::string bad = "ab\xff\xfe cd\xe4";
    CHECK(count_tokens(bad) == 2);
}

TEST_CASE("spans index the source text and concatenation is monotone") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        const auto a = test::random_words(rng, 0, 10);
        const auto b = test::random_words(rng, 0, 10);
        const auto spans = token_spans(a);
        const auto toks = tokenize(a);
        REQUIRE(spans.size() == toks.size());
        for (std::size_t k = 0; k < spans.size(); ++k) CHECK(a.substr(spans[k].offset, spans[k].length) == toks[k]);
        const auto ab = count_tokens(a + b);
        CHECK(ab >= std::max(count_tokens(a), count_tokens(b)));
        CHECK(count_tokens(a + " " + b) == count_tokens(a) + count_tokens(b));
    }
}

} // TEST_SUITE
