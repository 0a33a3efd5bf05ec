#pragma once

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "imputeforge/errors.hpp"
#include "imputeforge/prompt.hpp"
#include "imputeforge/rng.hpp"
#include "imputeforge/util.hpp"

namespace imputeforge {

enum class BackendKind { HttpChat, MockMode };

struct BackendConfig {
    BackendKind kind = BackendKind::MockMode;
    std::string endpoint;  // e.g. https://host/v1/chat/completions
    std::string model;
    double temperature = 0.0;  // deterministic by default
    std::size_t max_output_tokens = 1024;
    double timeout_s = 60.0;
    std::size_t max_retries = 3;
    std::string api_key_env = "IMPUTE_FORGE_API_KEY";
    std::size_t max_in_flight = 2;
    std::size_t backoff_base_ms = 1000;
    std::uint64_t jitter_seed = 0;
};

struct CompletionExchange {
    std::string prompt_text;
    std::string response_text;
    long long latency_ms = 0;
    std::size_t attempt_count = 0;
    std::size_t estimated_prompt_tokens = 0;
    std::vector<std::size_t> backoff_schedule_ms;  // sleeps taken between attempts
};

/// Class-conditional imputation: the mode of the example values of the
/// missing row's class for categorical features, the lower median for
/// numerical ones. One value per line, manifest order.
inline std::string mock_impute(const MockContext& ctx) {
    std::string out;
    for (std::size_t i = 0; i < ctx.row_classes.size(); ++i) {
        const std::string& label = ctx.row_classes[i];
        auto it = ctx.examples_by_class.find(label);
        if (it == ctx.examples_by_class.end() || it->second.empty()) {
            throw NoExamplesForClass("no example values for class '" + label + "'");
        }
        std::string value;
        if (ctx.feature_kind == ColumnKind::Categorical) {
            std::map<std::string, std::size_t> counts;
            for (const auto& v : it->second) ++counts[v];
            std::size_t best = 0;
            for (const auto& [v, n] : counts) {
                if (n > best) {  // map order makes ties lexicographically smallest
                    best = n;
                    value = v;
                }
            }
        } else {
            std::vector<double> nums;
            nums.reserve(it->second.size());
            for (const auto& v : it->second) {
                auto parsed = parse_number(v);
                if (!parsed) throw NumericParseFailure(i, v);
                nums.push_back(*parsed);
            }
            std::sort(nums.begin(), nums.end());
            value = format_number(nums[(nums.size() - 1) / 2]);  // lower middle on even counts
        }
        if (i) out += "\n";
        out += value;
    }
    return out;
}

namespace detail {

struct EndpointParts {
    std::string base;  // scheme://host[:port]
    std::string path;
};

inline EndpointParts parse_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw MalformedProviderResponse("endpoint URL has no scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

/// Exponential backoff: base · 2^attempt with ±20% jitter.
inline std::size_t backoff_delay_ms(std::size_t attempt, std::size_t base_ms, Rng& rng) {
    double nominal = static_cast<double>(base_ms) * std::pow(2.0, static_cast<double>(attempt));
    double factor = 0.8 + 0.4 * rng.unit();
    return static_cast<std::size_t>(nominal * factor);
}

}  // namespace detail

/// Uniform completion interface. HttpChat posts a single user-role message
/// carrying the prompt text verbatim and retries transport errors and HTTP
/// 429/5xx with exponential backoff; MockMode answers deterministically with
/// zero network activity.
class Backend {
public:
    explicit Backend(BackendConfig cfg)
        : cfg_(std::move(cfg)),
          in_flight_(std::make_unique<std::counting_semaphore<>>(
              static_cast<std::ptrdiff_t>(std::max<std::size_t>(cfg_.max_in_flight, 1)))),
          jitter_(cfg_.jitter_seed) {}

    const BackendConfig& config() const { return cfg_; }

    CompletionExchange complete(const RenderedPrompt& prompt) {
        CompletionExchange ex;
        ex.prompt_text = prompt.text;
        ex.estimated_prompt_tokens = prompt.estimated_tokens;

        auto start = std::chrono::steady_clock::now();
        if (cfg_.kind == BackendKind::MockMode) {
            ex.response_text = mock_impute(prompt.mock);
            ex.attempt_count = 1;
        } else {
            http_complete(prompt, ex);
        }
        ex.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        return ex;
    }

private:
    void http_complete(const RenderedPrompt& prompt, CompletionExchange& ex) {
        if (cfg_.endpoint.empty() || cfg_.model.empty() || cfg_.api_key_env.empty()) {
            throw InvalidSchema("HttpChat backend requires endpoint, model and api_key_env");
        }
        const char* key = std::getenv(cfg_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw AuthMissing("environment variable '" + cfg_.api_key_env + "' is not set");
        }

        auto parts = detail::parse_endpoint(cfg_.endpoint);
        nlohmann::json body{{"model", cfg_.model},
                            {"temperature", cfg_.temperature},
                            {"max_tokens", cfg_.max_output_tokens},
                            {"messages", nlohmann::json::array({nlohmann::json{
                                             {"role", "user"}, {"content", prompt.text}}})}};
        const std::string payload = body.dump();
        httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};

        in_flight_->acquire();
        struct Release {
            std::counting_semaphore<>* sem;
            ~Release() { sem->release(); }
        } release{in_flight_.get()};

        httplib::Client client(parts.base);
        client.set_connection_timeout(std::chrono::duration<double>(cfg_.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(cfg_.timeout_s));
        client.set_write_timeout(std::chrono::duration<double>(cfg_.timeout_s));

        int last_status = 0;
        bool transport_failure = false;
        for (std::size_t attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
            ex.attempt_count = attempt + 1;
            auto res = client.Post(parts.path, headers, payload, "application/json");
            if (res) {
                last_status = res->status;
                transport_failure = false;
                if (res->status == 200) {
                    ex.response_text = extract_content(res->body);
                    return;
                }
                if (res->status != 429 && res->status < 500) {
                    throw MalformedProviderResponse("provider returned HTTP " +
                                                    std::to_string(res->status));
                }
            } else {
                transport_failure = true;
            }
            if (attempt < cfg_.max_retries) {
                std::size_t delay;
                {
                    std::lock_guard<std::mutex> lock(jitter_mutex_);
                    delay = detail::backoff_delay_ms(attempt, cfg_.backoff_base_ms, jitter_);
                }
                ex.backoff_schedule_ms.push_back(delay);
                std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            }
        }
        if (transport_failure) {
            throw Timeout("no response from " + cfg_.endpoint + " after " +
                          std::to_string(ex.attempt_count) + " attempts");
        }
        if (last_status == 429) {
            throw RateLimited("rate limited after " + std::to_string(ex.attempt_count) +
                              " attempts");
        }
        throw MalformedProviderResponse("provider returned HTTP " + std::to_string(last_status) +
                                        " after " + std::to_string(ex.attempt_count) +
                                        " attempts");
    }

    static std::string extract_content(const std::string& body) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception&) {
            throw MalformedProviderResponse("provider body is not valid JSON");
        }
        try {
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw MalformedProviderResponse("provider body lacks choices[0].message.content");
        }
    }

    BackendConfig cfg_;
    std::unique_ptr<std::counting_semaphore<>> in_flight_;
    Rng jitter_;
    std::mutex jitter_mutex_;
};

inline CompletionExchange complete(const BackendConfig& cfg, const RenderedPrompt& prompt) {
    Backend backend(cfg);
    return backend.complete(prompt);
}

}  // namespace imputeforge
