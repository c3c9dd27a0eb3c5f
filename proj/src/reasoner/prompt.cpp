#include "res/core/errors.hpp"
#include "res/core/json.hpp"
#include "res/reasoner/reasoner.hpp"

namespace res::reasoner {

namespace {

constexpr std::string_view kQueryPrefix = "Query: ";
constexpr std::string_view kSchemaMarker = "\n\nReturn only a JSON object";

constexpr std::string_view kSchemaBlock =
    "\n\nReturn only a JSON object that follows this schema, with no prose and no code fences:\n"
    "{\"intent\": \"trend\"|\"comparison\"|\"ranking\"|\"statistics\",\n"
    " \"subjects\": [string, ...],\n"
    " \"time_range\": {\"from_year\": int, \"until_year\": int},\n"
    " \"top_n\": int,\n"
    " \"rank_dimension\": \"venue\"|\"publisher\"|\"work_type\"}\n"
    "time_range, top_n and rank_dimension are optional. Use 1 to 5 subjects of at most 120 "
    "characters. comparison needs at least two subjects. top_n is 1..20 and only applies to "
    "ranking.";

}  // namespace

const std::string& system_prompt() {
    static const std::string prompt =
        "You are the query planner of a scholarly research assistant. Your only job is to turn "
        "a user's question about scholarly publishing into a structured query plan.\n"
        "Classify the question into exactly one intent:\n"
        "- trend: how publication volume on a topic changes across years\n"
        "- comparison: publication volume of two or more topics side by side\n"
        "- ranking: the leading journals (venue), publishers (publisher) or work types "
        "(work_type) for a topic\n"
        "- statistics: overall counts for a topic\n"
        "Extract the research topics as short noun phrases without filler words such as "
        "'research' or 'papers', and extract any year constraints.\n"
        "You have no access to any data. Never state numbers, counts or facts about the "
        "literature; another component retrieves all data.";
    return prompt;
}

llm::PromptSpec build_reasoner_prompt(const UserQuery& query) {
    llm::PromptSpec spec;
    spec.system_prompt = system_prompt();
    spec.user_content.reserve(query.text().size() + kSchemaBlock.size() + kQueryPrefix.size());
    spec.user_content.append(kQueryPrefix).append(query.text()).append(kSchemaBlock);
    return spec;
}

std::optional<std::string> query_from_prompt(std::string_view user_content) {
    if (user_content.substr(0, kQueryPrefix.size()) != kQueryPrefix) return std::nullopt;
    const auto end = user_content.rfind(kSchemaMarker);
    if (end == std::string_view::npos || end < kQueryPrefix.size()) return std::nullopt;
    return std::string(user_content.substr(kQueryPrefix.size(), end - kQueryPrefix.size()));
}

ParsedPlan parse_query(const UserQuery& query, llm::LlmProvider& provider) {
    auto prompt = build_reasoner_prompt(query);
    TokenUsage usage;

    auto first = provider.complete(prompt);
    usage += first.usage;
    usage.source = first.usage.source;
    try {
        return {validate_plan_json(first.text), usage};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PlanInvalid) throw;
        prompt.user_content += "\n\nThe previous response was rejected: ";
        prompt.user_content += e.what();
        prompt.user_content += ". Reply with the corrected JSON object only.";
    }

    auto second = provider.complete(prompt);
    usage += second.usage;
    return {validate_plan_json(second.text), usage};
}

}  // namespace res::reasoner
