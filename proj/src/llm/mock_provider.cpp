#include "res/llm/mock_provider.hpp"

#include "res/core/errors.hpp"
#include "res/core/json.hpp"
#include "res/core/tokens.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace res::llm {

void validate_config(const ProviderConfig& config) {
    if (config.kind != ProviderKind::Live) return;
    if (config.model_id.empty()) throw std::invalid_argument("live provider requires a model id");
    if (config.endpoint.empty()) throw std::invalid_argument("live provider requires an endpoint");
    if (config.api_key_ref.empty()) {
        throw std::invalid_argument("live provider requires an API key environment variable name");
    }
}

std::vector<Fixture> parse_fixtures(std::string_view json_text) {
    const auto doc = Json::parse(json_text);
    if (!doc.is_array()) throw std::invalid_argument("fixture file must be a JSON list");
    std::vector<Fixture> out;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("match") || !item.contains("response") ||
            !item.at("match").is_string() || !item.at("response").is_string()) {
            throw std::invalid_argument("fixture entries need string 'match' and 'response'");
        }
        out.push_back({item.at("match").get<std::string>(), item.at("response").get<std::string>()});
    }
    return out;
}

std::vector<Fixture> load_fixtures(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open fixture file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_fixtures(ss.str());
}

MockProvider::MockProvider(std::vector<Fixture> fixtures, Fallback fallback)
    : fallback_(std::move(fallback)) {
    for (auto& f : fixtures) {
        Entry e{std::move(f), std::nullopt};
        try {
            e.pattern.emplace(e.fixture.match, std::regex::ECMAScript);
        } catch (const std::regex_error&) {
            // substring matching only
        }
        entries_.push_back(std::move(e));
    }
}

ProviderResponse MockProvider::complete(const PromptSpec& prompt) {
    {
        std::lock_guard lock(mutex_);
        ++calls_;
    }
    std::optional<std::string> text;
    for (const auto& e : entries_) {
        if (prompt.user_content.find(e.fixture.match) != std::string::npos ||
            (e.pattern && std::regex_search(prompt.user_content, *e.pattern))) {
            text = e.fixture.response;
            break;
        }
    }
    if (!text) {
        if (!fallback_) fail(ErrorKind::ProviderError, "mock provider: no fixture matched and no fallback");
        text = fallback_(prompt);
    }
    ProviderResponse r;
    r.usage.input_tokens = estimate_tokens(prompt.system_prompt) + estimate_tokens(prompt.user_content);
    r.usage.output_tokens = estimate_tokens(*text);
    r.usage.source = UsageSource::Estimated;
    r.text = std::move(*text);
    r.provider_name = name();
    return r;
}

std::size_t MockProvider::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

}  // namespace res::llm
