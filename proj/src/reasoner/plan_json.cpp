#include "res/core/errors.hpp"
#include "res/core/json.hpp"
#include "res/reasoner/reasoner.hpp"

namespace res::reasoner {

namespace {

// Models sometimes wrap the object in a code fence or a sentence.
std::optional<Json> parse_lenient(std::string_view text) {
    auto doc = Json::parse(text, nullptr, false);
    if (!doc.is_discarded()) return doc;
    const auto open = text.find('{');
    const auto close = text.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        return std::nullopt;
    }
    doc = Json::parse(text.substr(open, close - open + 1), nullptr, false);
    if (doc.is_discarded()) return std::nullopt;
    return doc;
}

}  // namespace

QueryPlan validate_plan_json(std::string_view text) {
    auto doc = parse_lenient(text);
    if (!doc || !doc->is_object()) fail(ErrorKind::PlanInvalid, "response is not a JSON object");

    QueryPlan plan;
    try {
        plan = plan_from_json(*doc);
    } catch (const std::exception& e) {
        fail(ErrorKind::PlanInvalid, e.what());
    }

    for (auto& s : plan.subjects) s = trim(s);

    switch (plan.intent) {
        case Intent::Trend:
            if (!plan.time_range) plan.time_range = default_trend_range();
            break;
        case Intent::Ranking:
            if (!plan.top_n) plan.top_n = 10;
            if (!plan.rank_dimension) plan.rank_dimension = RankDimension::Venue;
            break;
        case Intent::Comparison:
        case Intent::Statistics:
            plan.top_n.reset();
            plan.rank_dimension.reset();
            break;
    }
    if (plan.intent == Intent::Trend) {
        plan.top_n.reset();
        plan.rank_dimension.reset();
    }
    validate_plan(plan);
    return plan;
}

}  // namespace res::reasoner
