// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"
#include "toolagent/io.hpp"
#include "toolagent/testing/mock_servers.hpp"
#include "toolagent/toolkit.hpp"

using namespace toolagent;
using toolagent::testing::MockReply;
using toolagent::testing::MockToolServer;

namespace {

ToolSchema renew_schema(Endpoint endpoint = Endpoint::local("renew-ecs")) {
    return ToolSchema{"renew-ecs",
                      "Renew an Alibaba Cloud ECS instance for a number of months",
                      {{"instance_id", "instance to renew", true}, {"period", "months", true}},
                      std::move(endpoint)};
}

ToolSchema simple(std::string name, std::string description) {
    return ToolSchema{std::move(name), std::move(description), {}, Endpoint::local("none")};
}

// Brute-force ranking: score every description and sort by (score desc, name).
std::vector<std::string> oracle_ranking(const std::vector<ToolSchema>& tools, const std::string& query,
                                        std::size_t k) {
    const auto q = local_embed(query, LocalEmbedder::default_dimension);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& t : tools) {
        const auto v = local_embed(t.description, LocalEmbedder::default_dimension);
        double s = 0;
        for (std::size_t i = 0; i < v.size(); ++i) s += q[i] * v[i];
        scored.emplace_back(s, t.name);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> names;
    for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) names.push_back(scored[i].second);
    return names;
}

std::vector<std::string> names_of(const std::vector<RetrievalHit>& hits) {
    std::vector<std::string> out;
    for (const auto& h : hits) out.push_back(h.tool_name);
    return out;
}

} // namespace

TEST_SUITE("toolkit") {

TEST_CASE("registering a tool makes it retrievable and replaceable") {
    ToolRegistry registry;
    registry.register_tool(renew_schema());
    CHECK(registry.contains("renew-ecs"));
    CHECK(registry.size() == 1);

    auto updated = renew_schema();
    updated.description = "Extend the subscription of a cloud server";
    registry.register_tool(updated);
    CHECK(registry.size() == 1);
    CHECK(registry.find("renew-ecs")->description == updated.description);

    auto dup = renew_schema();
    dup.parameters.push_back({"period", "again", false});
    CHECK_THROWS_AS(registry.register_tool(dup), Error);
    CHECK(registry.find("renew-ecs")->description == updated.description);
}

TEST_CASE("retrieval returns min(k, n) hits in descending score order") {
    ToolRegistry registry;
    register_default_tools(registry);
    const auto n = registry.size();
    for (std::size_t k : {std::size_t{1}, std::size_t{3}, n, n + 5}) {
        const auto hits = registry.retrieve("translate this English sentence", k);
        CHECK(hits.size() == std::min(k, n));
        for (std::size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].score >= hits[i].score);
    }
    CHECK_THROWS_AS((void)registry.retrieve("anything", 0), Error);
}

TEST_CASE("five tools, k of three") {
    ToolRegistry registry;
    std::vector<ToolSchema> tools{simple("a", "draw a picture of a scene"), simple("b", "translate english text"),
                                  simple("c", "renew a cloud server instance"), simple("d", "read text aloud"),
                                  simple("e", "summarize a long document")};
    for (const auto& t : tools) registry.register_tool(t);
    const auto hits = registry.retrieve("draw a picture of a cat", 3);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].tool_name == "a");
    CHECK(names_of(hits) == oracle_ranking(tools, "draw a picture of a cat", 3));
}

TEST_CASE("equal scores are ordered by name") {
    ToolRegistry registry;
    registry.register_tool(simple("zeta", "same words here"));
    registry.register_tool(simple("alpha", "same words here"));
    registry.register_tool(simple("mid", "same words here"));
    CHECK(names_of(registry.retrieve("same words", 3)) == std::vector<std::string>{"alpha", "mid", "zeta"});
}

TEST_CASE("a query equal to a description ranks that tool first") {
    ToolRegistry registry;
    register_default_tools(registry);
    for (const auto& schema : registry.schemas()) {
        const auto hits = registry.retrieve(schema.description, 1);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].score == doctest::Approx(1.0));
        // Another tool may tie only with an identical embedding.
        if (hits[0].tool_name != schema.name) {
            CHECK(hits[0].score == doctest::Approx(registry.retrieve(schema.description, 2)[1].score));
        }
    }
}

TEST_CASE("retrieval matches a brute-force ranking") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        ToolRegistry registry;
        std::vector<ToolSchema> tools;
        const auto n = std::uniform_int_distribution<int>(1, 20)(rng);
        for (int i = 0; i < n; ++i) {
            tools.push_back(simple("t" + std::to_string(i), test::random_words(rng, 1, 8)));
            registry.register_tool(tools.back());
        }
        const auto query = test::random_words(rng, 1, 5);
        const auto k = std::uniform_int_distribution<std::size_t>(1, 25)(rng);
        CHECK(names_of(registry.retrieve(query, k)) == oracle_ranking(tools, query, k));
    }
}

TEST_CASE("adding a tool never reorders the existing ones") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        ToolRegistry registry;
        const auto n = std::uniform_int_distribution<int>(1, 12)(rng);
        for (int i = 0; i < n; ++i) registry.register_tool(simple("t" + std::to_string(i), test::random_words(rng, 1, 6)));
        const auto query = test::random_words(rng, 1, 4);
        const auto before = names_of(registry.retrieve(query, 100));
        registry.register_tool(simple("new", test::random_words(rng, 1, 6)));
        auto after = names_of(registry.retrieve(query, 100));
        after.erase(std::find(after.begin(), after.end(), "new"));
        CHECK(after == before);
    }
}

TEST_CASE("an empty library cannot be searched") {
    ToolRegistry registry;
    try {
        (void)registry.retrieve("anything", 3);
        FAIL("expected empty_index");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_index);
    }
}

TEST_CASE("remote execution posts the arguments once") {
    MockToolServer server([](const std::string&, const Json&) { return MockReply{200, "renewed"}; });
    ToolRegistry registry;
    registry.register_tool(renew_schema(Endpoint::remote(server.url_for("renew-ecs"))));
    const auto result = registry.execute(ApiRequest{"renew-ecs", {{"instance_id", "i-rj90a7e840y5cde"}, {"period", "12"}}});
    CHECK(result.ok());
    CHECK(result.payload == "renewed");
    const auto calls = server.calls();
    REQUIRE(calls.size() == 1);
    CHECK(calls[0].tool == "renew-ecs");
    CHECK(calls[0].arguments == Json{{"instance_id", "i-rj90a7e840y5cde"}, {"period", "12"}});
}

TEST_CASE("execution failures come back as error results") {
    MockToolServer server([](const std::string&, const Json&) { return MockReply{500, "boom"}; });
    ToolRegistry registry;
    registry.register_tool(renew_schema(Endpoint::remote(server.url_for("renew-ecs"))));

    const auto missing = registry.execute(ApiRequest{"renew-ecs", {{"instance_id", "i-1"}}});
    CHECK_FALSE(missing.ok());
    CHECK(missing.payload.find("period") != std::string::npos);
    CHECK(server.calls().empty());

    const auto unknown = registry.execute(ApiRequest{"imagine-api", {}});
    CHECK_FALSE(unknown.ok());
    CHECK(unknown.api_name == "imagine-api");

    const auto remote = registry.execute(ApiRequest{"renew-ecs", {{"instance_id", "i-1"}, {"period", "1"}}});
    CHECK_FALSE(remote.ok());
    CHECK(remote.payload.find("500") != std::string::npos);

    registry.register_handler("thrower", [](const ApiRequest&) -> std::string { throw std::runtime_error("nope"); });
    registry.register_tool(ToolSchema{"t", "d", {}, Endpoint::local("thrower")});
    const auto thrown = registry.execute(ApiRequest{"t", {}});
    CHECK_FALSE(thrown.ok());
    CHECK(thrown.payload == "nope");
}

TEST_CASE("default tools execute locally") {
    ToolRegistry registry;
    register_default_tools(registry);
    for (const auto& schema : registry.schemas()) {
        ApiRequest req{schema.name, {}};
        for (const auto& p : schema.parameters) req.arguments[p.name] = "value";
        const auto a = registry.execute(req);
        CHECK_MESSAGE(a.ok(), schema.name);
        CHECK(registry.execute(req) == a);
    }
}

TEST_CASE("bundled manifest validates") {
    const auto tools = load_tool_manifest(test::data_dir() / "tools.json");
    ToolRegistry registry;
    for (const auto& t : tools) registry.register_tool(t);
    CHECK(registry.size() == tools.size());
}

} // TEST_SUITE

TEST_SUITE("embedding") {

TEST_CASE("vectors are unit length or zero") {
    std::mt19937_64 rng(29);
    LocalEmbedder embedder;
    CHECK(l2_norm(embedder.embed("")) == 0.0);
    CHECK(l2_norm(embedder.embed("   ")) == 0.0);
    for (int i = 0; i < 200; ++i) {
        const auto text = test::random_words(rng, 1, 12);
        const auto v = embedder.embed(text);
        CHECK(v.size() == embedder.dimension());
        CHECK(l2_norm(v) == doctest::Approx(1.0));
    }
}

TEST_CASE("bag of words ignores order and ASCII case") {
    LocalEmbedder embedder(64);
    CHECK(embedder.embed("the cat sat") == embedder.embed("sat the cat"));
    CHECK(embedder.embed("Draw A Cat") == embedder.embed("draw a cat"));
    CHECK(embedder.embed("a cat.") == embedder.embed("a cat"));
    CHECK(dot(embedder.embed("cat"), embedder.embed("cat")) == doctest::Approx(1.0));
}

} // TEST_SUITE
