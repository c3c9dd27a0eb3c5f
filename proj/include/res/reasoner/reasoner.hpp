#pragma once

#include "res/core/types.hpp"
#include "res/llm/provider.hpp"

#include <optional>
#include <string>
#include <string_view>

// Layer 1. Maps a question to a validated QueryPlan. Nothing in this module
// can reach a data source: no operation accepts one.
namespace res::reasoner {

/// The fixed Reasoner instruction block; identical for every call.
const std::string& system_prompt();

llm::PromptSpec build_reasoner_prompt(const UserQuery& query);

/// Recovers the question from a Reasoner user_content, so deterministic
/// backends behind a provider can answer a Reasoner prompt.
std::optional<std::string> query_from_prompt(std::string_view user_content);

/// Deterministic grammar backend. Ordered rules, first match wins:
///   1. "compare"/"vs"/"versus"   -> Comparison, subjects split on the
///      comparator, commas and "and"
///   2. "top [N]"/"most"/"leading" -> Ranking, N = first integer in 1..20
///      (default 10); "journal(s)" venue, "publisher(s)" publisher,
///      "type(s)" work_type, default venue
///   3. "trend"/"grow*"/"over time"/"per year" or two years -> Trend
///   4. otherwise                   -> Statistics
/// Years are 4-digit tokens in 1600..current+1; "since Y" means Y..current.
/// Subjects keep their original casing; lead-ins and filler words are
/// stripped from the phrase edges only.
/// Throws res::Error(PlanInvalid) when no subject can be extracted.
QueryPlan rule_based_parse(const UserQuery& query);

/// Parses a plan from model output (tolerating code fences or surrounding
/// prose), normalizes it and applies defaults: Trend without years gets the
/// last 10 full calendar years, Ranking gets top_n 10 and venue. Throws
/// res::Error(PlanInvalid) naming the first problem found.
QueryPlan validate_plan_json(std::string_view text);

struct ParsedPlan {
    QueryPlan plan;
    TokenUsage usage;
};

/// Sends the Reasoner prompt to the provider and validates the reply. A
/// rejected reply is retried exactly once with the validation error
/// appended. Usage accumulates across both calls.
ParsedPlan parse_query(const UserQuery& query, llm::LlmProvider& provider);

YearRange default_trend_range();

}  // namespace res::reasoner
