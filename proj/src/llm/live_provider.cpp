#include "res/llm/live_provider.hpp"

#include "res/core/errors.hpp"
#include "res/core/json.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace res::llm {

namespace {

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

class SemaphoreGuard {
public:
    explicit SemaphoreGuard(std::counting_semaphore<64>& sem) : sem_(sem) { sem_.acquire(); }
    ~SemaphoreGuard() { sem_.release(); }
    SemaphoreGuard(const SemaphoreGuard&) = delete;
    SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

private:
    std::counting_semaphore<64>& sem_;
};

std::string read_key(const ProviderConfig& config) {
    const char* value = std::getenv(config.api_key_ref.c_str());
    if (value == nullptr || *value == '\0') {
        throw std::invalid_argument("environment variable " + config.api_key_ref + " is not set");
    }
    return value;
}

}  // namespace

LiveProvider::LiveProvider(ProviderConfig config) : LiveProvider(config, read_key(config)) {}

LiveProvider::LiveProvider(ProviderConfig config, std::string api_key)
    : config_(std::move(config)),
      api_key_(std::move(api_key)),
      in_flight_(std::clamp(config_.max_in_flight, 1, 64)) {
    config_.kind = ProviderKind::Live;
    validate_config(config_);
}

ProviderResponse LiveProvider::complete(const PromptSpec& prompt) {
    SemaphoreGuard guard(in_flight_);

    Json body{{"model", config_.model_id},
              {"max_tokens", config_.max_output_tokens},
              {"system", prompt.system_prompt},
              {"messages", Json::array({Json{{"role", "user"}, {"content", prompt.user_content}}})}};
    const std::string payload = body.dump();
    const httplib::Headers headers{{"x-api-key", api_key_}, {"anthropic-version", "2023-06-01"}};

    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);

    std::string last_error;
    auto backoff = config_.initial_backoff;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(config_.endpoint);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        auto result = client.Post("/v1/messages", headers, payload, "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status != 200) {
            last_error = "HTTP " + std::to_string(result->status);
            if (retryable_status(result->status)) continue;
            fail(ErrorKind::ProviderError, last_error + ": " + result->body.substr(0, 200));
        }

        Json doc = Json::parse(result->body, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::ProviderError, "response is not JSON");
        ProviderResponse out;
        if (doc.contains("content") && doc["content"].is_array()) {
            for (const auto& block : doc["content"]) {
                if (block.value("type", "") == "text" && block.contains("text")) {
                    out.text += block["text"].get<std::string>();
                }
            }
        }
        const auto usage = doc.value("usage", Json::object());
        out.usage.input_tokens = usage.value("input_tokens", std::uint64_t{0});
        out.usage.output_tokens = usage.value("output_tokens", std::uint64_t{0});
        out.usage.source = UsageSource::Reported;
        out.provider_name = name();
        return out;
    }
    fail(ErrorKind::ProviderError, "gave up after retries: " + last_error);
}

}  // namespace res::llm
