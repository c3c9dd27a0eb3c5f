#pragma once

#include "res/llm/provider.hpp"

#include <semaphore>
#include <string>

namespace res::llm {

/// HTTP adapter for the Anthropic Messages API.
///
/// Request:  POST {endpoint}/v1/messages with headers x-api-key and
///           anthropic-version, body {model, max_tokens, system,
///           messages: [{role: "user", content: user_content}]}.
/// Response: text is the concatenation of content[].text blocks of type
///           "text"; usage is taken from usage.input_tokens and
///           usage.output_tokens and flagged as reported.
///
/// Transport failures, 408, 429 and 5xx responses are retried with
/// exponential backoff (initial_backoff, doubling) up to max_retries; any
/// other status fails immediately. At most max_in_flight calls run at once.
class LiveProvider final : public LlmProvider {
public:
    // Reads the API key from the environment variable named by api_key_ref.
    explicit LiveProvider(ProviderConfig config);
    LiveProvider(ProviderConfig config, std::string api_key);

    ProviderResponse complete(const PromptSpec& prompt) override;
    std::string name() const override { return "live:" + config_.model_id; }

private:
    ProviderConfig config_;
    std::string api_key_;
    std::counting_semaphore<64> in_flight_;
};

}  // namespace res::llm
