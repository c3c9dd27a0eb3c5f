#pragma once

#include "res/llm/provider.hpp"

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace res::llm {

struct Fixture {
    std::string match;
    std::string response;
};

// Loads the fixture file format: a JSON list of {"match", "response"}.
std::vector<Fixture> load_fixtures(const std::filesystem::path& path);
std::vector<Fixture> parse_fixtures(std::string_view json_text);

/// Deterministic offline provider. A prompt is answered by the first fixture
/// whose match string occurs in user_content (as a substring, or as an
/// ECMAScript regex search when it compiles); otherwise by the fallback.
/// Usage is estimated from prompt and response text.
class MockProvider final : public LlmProvider {
public:
    using Fallback = std::function<std::string(const PromptSpec&)>;

    MockProvider(std::vector<Fixture> fixtures, Fallback fallback);

    ProviderResponse complete(const PromptSpec& prompt) override;
    std::string name() const override { return "mock"; }

    std::size_t call_count() const;

private:
    struct Entry {
        Fixture fixture;
        std::optional<std::regex> pattern;
    };
    std::vector<Entry> entries_;
    Fallback fallback_;
    mutable std::mutex mutex_;
    std::size_t calls_ = 0;
};

}  // namespace res::llm
