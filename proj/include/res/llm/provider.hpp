#pragma once

#include "res/core/types.hpp"

#include <chrono>
#include <string>

namespace res::llm {

/// A single completion request. The system prompt is the fixed instruction
/// block of a call site; user_content carries the per-call input.
struct PromptSpec {
    std::string system_prompt;
    std::string user_content;
};

struct ProviderResponse {
    std::string text;
    TokenUsage usage;
    std::string provider_name;
};

enum class ProviderKind { Mock, Live };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Mock;
    std::string model_id = "claude-sonnet-4-20250514";
    std::string endpoint = "https://api.anthropic.com";
    std::string api_key_ref = "ANTHROPIC_API_KEY";
    std::chrono::milliseconds timeout{30000};
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    int max_in_flight = 4;
    int max_output_tokens = 1024;
};

// Throws std::invalid_argument when a live config lacks model/endpoint/key ref.
void validate_config(const ProviderConfig& config);

/// Completion contract shared by the Reasoner, the Synthesizer and the naive
/// baseline. Implementations must be safe for concurrent complete() calls.
/// Failures surface as res::Error(ProviderError).
class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual ProviderResponse complete(const PromptSpec& prompt) = 0;
    virtual std::string name() const = 0;
};

}  // namespace res::llm
