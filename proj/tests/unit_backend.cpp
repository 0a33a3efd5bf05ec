#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "imputeforge/backend.hpp"
#include "support.hpp"

using namespace imputeforge;
using Catch::Matchers::WithinAbs;

namespace {

RenderedPrompt tiny_prompt(const std::string& text = "prompt body") {
    RenderedPrompt p;
    p.text = text;
    p.estimated_tokens = estimate_tokens(text);
    p.manifest = {4, 9};
    p.mock.feature_kind = ColumnKind::Categorical;
    p.mock.examples_by_class = {{"a", {"Yes", "Yes", "No"}}, {"b", {"No", "No"}}};
    p.mock.row_classes = {"a", "b"};
    return p;
}

struct StubServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit StubServer(httplib::Server::Handler handler) {
        server.Post("/v1/chat/completions", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~StubServer() {
        server.stop();
        thread.join();
    }

    std::string endpoint() const {
        return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    }
};

std::string chat_body(const std::string& content) {
    nlohmann::json doc{{"choices", nlohmann::json::array({nlohmann::json{
                                       {"message", {{"role", "assistant"}, {"content", content}}}}})}};
    return doc.dump();
}

}  // namespace

TEST_CASE("mock_impute applies class-conditional mode and median rules") {
    MockContext ctx;
    ctx.feature_kind = ColumnKind::Categorical;
    ctx.examples_by_class["a"] = {"Yes", "Yes", "No"};
    ctx.row_classes = {"a"};
    CHECK(mock_impute(ctx) == "Yes");

    ctx.examples_by_class["a"] = {"Yes", "No"};  // tie: lexicographically smaller wins
    CHECK(mock_impute(ctx) == "No");

    MockContext nums;
    nums.feature_kind = ColumnKind::Numerical;
    nums.examples_by_class["a"] = {"1", "3", "9", "20"};
    nums.row_classes = {"a"};
    CHECK(mock_impute(nums) == "3");  // lower middle of an even count
    nums.examples_by_class["a"] = {"9", "1", "3"};
    CHECK(mock_impute(nums) == "3");

    MockContext multi;
    multi.feature_kind = ColumnKind::Categorical;
    multi.examples_by_class["a"] = {"Yes"};
    multi.examples_by_class["b"] = {"No"};
    multi.row_classes = {"b", "a", "b"};
    CHECK(mock_impute(multi) == "No\nYes\nNo");

    MockContext missing_class;
    missing_class.feature_kind = ColumnKind::Categorical;
    missing_class.examples_by_class["a"] = {"Yes"};
    missing_class.row_classes = {"zzz"};
    CHECK_THROWS_AS(mock_impute(missing_class), NoExamplesForClass);
}

TEST_CASE("MockMode completion is deterministic and networkless") {
    BackendConfig cfg;
    cfg.kind = BackendKind::MockMode;
    RenderedPrompt p = tiny_prompt();
    CompletionExchange a = complete(cfg, p);
    CompletionExchange b = complete(cfg, p);
    CHECK(a.response_text == b.response_text);
    CHECK(a.response_text == "Yes\nNo");
    CHECK(a.attempt_count == 1);
    CHECK(a.prompt_text == p.text);
    CHECK(a.estimated_prompt_tokens == p.estimated_tokens);
}

TEST_CASE("HttpChat rejects configs without endpoint or model") {
    BackendConfig cfg;
    cfg.kind = BackendKind::HttpChat;
    cfg.model = "m";
    CHECK_THROWS_AS(complete(cfg, tiny_prompt()), InvalidSchema);  // no endpoint
    cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";
    cfg.model = "";
    CHECK_THROWS_AS(complete(cfg, tiny_prompt()), InvalidSchema);  // no model
}

TEST_CASE("HttpChat requires the key env var before any network activity") {
    BackendConfig cfg;
    cfg.kind = BackendKind::HttpChat;
    cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";  // discard port; never reached
    cfg.model = "test-model";
    cfg.api_key_env = "IMPUTEFORGE_TEST_UNSET_KEY";
    ::unsetenv("IMPUTEFORGE_TEST_UNSET_KEY");
    CHECK_THROWS_AS(complete(cfg, tiny_prompt()), AuthMissing);
}

TEST_CASE("HttpChat posts the prompt verbatim and returns the first choice") {
    std::string seen_body;
    std::string seen_auth;
    StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        seen_auth = req.get_header_value("Authorization");
        res.set_content(chat_body("Yes\nNo"), "application/json");
    });

    ::setenv("IMPUTEFORGE_TEST_KEY", "sk-stub", 1);
    BackendConfig cfg;
    cfg.kind = BackendKind::HttpChat;
    cfg.endpoint = stub.endpoint();
    cfg.model = "test-model";
    cfg.temperature = 0.0;
    cfg.max_output_tokens = 64;
    cfg.api_key_env = "IMPUTEFORGE_TEST_KEY";

    RenderedPrompt p = tiny_prompt("line one\nline two, with comma");
    CompletionExchange ex = complete(cfg, p);
    CHECK(ex.response_text == "Yes\nNo");
    CHECK(ex.attempt_count == 1);
    CHECK(seen_auth == "Bearer sk-stub");

    auto body = nlohmann::json::parse(seen_body);
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["max_tokens"] == 64);
    REQUIRE(body["messages"].size() == 1);
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == p.text);  // never mutated
}

TEST_CASE("transient 5xx responses are retried with recorded backoff") {
    std::atomic<int> calls{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        if (calls++ == 0) {
            res.status = 500;
            res.set_content("oops", "text/plain");
        } else {
            res.set_content(chat_body("ok"), "application/json");
        }
    });

    ::setenv("IMPUTEFORGE_TEST_KEY", "sk-stub", 1);
    BackendConfig cfg;
    cfg.kind = BackendKind::HttpChat;
    cfg.endpoint = stub.endpoint();
    cfg.model = "m";
    cfg.api_key_env = "IMPUTEFORGE_TEST_KEY";
    cfg.backoff_base_ms = 1;

    CompletionExchange ex = complete(cfg, tiny_prompt());
    CHECK(ex.response_text == "ok");
    CHECK(ex.attempt_count == 2);
    CHECK(calls == 2);
    REQUIRE(ex.backoff_schedule_ms.size() == 1);
}

TEST_CASE("429 exhaustion raises RateLimited after max_retries + 1 attempts") {
    std::atomic<int> calls{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 429;
        res.set_content("slow down", "text/plain");
    });

    ::setenv("IMPUTEFORGE_TEST_KEY", "sk-stub", 1);
    BackendConfig cfg;
    cfg.kind = BackendKind::HttpChat;
    cfg.endpoint = stub.endpoint();
    cfg.model = "m";
    cfg.api_key_env = "IMPUTEFORGE_TEST_KEY";
    cfg.max_retries = 2;
    cfg.backoff_base_ms = 1;

    CHECK_THROWS_AS(complete(cfg, tiny_prompt()), RateLimited);
    CHECK(calls == 3);
}

TEST_CASE("malformed 200 bodies fail without retry") {
    std::atomic<int> calls{0};
    StubServer stub([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.set_content("{\"nope\": true}", "application/json");
    });

    ::setenv("IMPUTEFORGE_TEST_KEY", "sk-stub", 1);
    BackendConfig cfg;
    cfg.kind = BackendKind::HttpChat;
    cfg.endpoint = stub.endpoint();
    cfg.model = "m";
    cfg.api_key_env = "IMPUTEFORGE_TEST_KEY";
    cfg.backoff_base_ms = 1;

    CHECK_THROWS_AS(complete(cfg, tiny_prompt()), MalformedProviderResponse);
    CHECK(calls == 1);
}

TEST_CASE("backoff delays follow base * 2^attempt within the jitter band") {
    Rng rng(123);
    for (std::size_t attempt = 0; attempt < 5; ++attempt) {
        double nominal = 1000.0 * std::pow(2.0, double(attempt));
        for (int i = 0; i < 50; ++i) {
            std::size_t d = imputeforge::detail::backoff_delay_ms(attempt, 1000, rng);
            CHECK(double(d) >= 0.8 * nominal - 1.0);
            CHECK(double(d) <= 1.2 * nominal + 1.0);
        }
    }
}
