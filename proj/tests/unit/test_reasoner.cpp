#include "res/core/errors.hpp"
#include "res/core/json.hpp"
#include "res/core/tokens.hpp"
#include "res/llm/mock_provider.hpp"
#include "res/reasoner/reasoner.hpp"

#include <doctest.h>

using namespace res;
using reasoner::rule_based_parse;

namespace {

QueryPlan parse(const std::string& text) { return rule_based_parse(UserQuery::make(text)); }

ErrorKind plan_error(std::string_view json) {
    try {
        reasoner::validate_plan_json(json);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("accepted: " << json);
    return ErrorKind::SourceError;
}

}  // namespace

TEST_CASE("grammar: worked examples") {
    const auto trend = parse("How has quantum computing grown from 2015 to 2024?");
    CHECK(trend.intent == Intent::Trend);
    CHECK(trend.subjects == std::vector<std::string>{"quantum computing"});
    CHECK(trend.time_range == YearRange{2015, 2024});

    const auto cmp = parse("Compare CRISPR vs gene therapy");
    CHECK(cmp.intent == Intent::Comparison);
    CHECK(cmp.subjects == std::vector<std::string>{"CRISPR", "gene therapy"});
    CHECK_FALSE(cmp.time_range.has_value());

    const auto rank = parse("Top 10 journals publishing on graphene");
    CHECK(rank.intent == Intent::Ranking);
    CHECK(rank.subjects == std::vector<std::string>{"graphene"});
    CHECK(rank.top_n == 10);
    CHECK(rank.rank_dimension == RankDimension::Venue);

    const auto stats = parse("How many articles about cybersecurity?");
    CHECK(stats.intent == Intent::Statistics);
    CHECK(stats.subjects == std::vector<std::string>{"cybersecurity"});
    CHECK_FALSE(stats.top_n.has_value());
}

TEST_CASE("grammar: rule order and details") {
    // Comparison wins over ranking and trend cues.
    CHECK(parse("Compare the top journals for graphene and CRISPR").intent == Intent::Comparison);
    CHECK(parse("graphene versus CRISPR from 2010 to 2020").time_range == YearRange{2010, 2020});

    const auto pubs = parse("Which publishers publish the most on CRISPR?");
    CHECK(pubs.intent == Intent::Ranking);
    CHECK(pubs.rank_dimension == RankDimension::Publisher);
    CHECK(pubs.top_n == 10);

    CHECK(parse("Top 3 work types for graphene").rank_dimension == RankDimension::WorkType);
    CHECK(parse("Top 3 work types for graphene").subjects == std::vector<std::string>{"graphene"});
    CHECK(parse("top 50 venues for graphene").top_n == 10);

    const auto since = parse("machine learning papers per year since 2016");
    CHECK(since.intent == Intent::Trend);
    CHECK(since.time_range == YearRange{2016, current_utc_year()});

    const auto bare = parse("graphene trend");
    CHECK(bare.time_range == reasoner::default_trend_range());
    CHECK(reasoner::default_trend_range() == YearRange{current_utc_year() - 10, current_utc_year() - 1});

    CHECK(parse("Compare graphene, CRISPR and robotics").subjects ==
          std::vector<std::string>{"graphene", "CRISPR", "robotics"});
}

TEST_CASE("grammar: no subject means plan_invalid") {
    CHECK_THROWS_AS(parse("???"), Error);
    try {
        parse("how many?");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PlanInvalid);
    }
}

TEST_CASE("validate_plan_json") {
    const auto p = reasoner::validate_plan_json(R"({"intent":"comparison","subjects":["a","b"]})");
    CHECK(p.intent == Intent::Comparison);
    CHECK(plan_error(R"({"intent":"flight_booking","subjects":["a"]})") == ErrorKind::PlanInvalid);
    CHECK(plan_error(R"({"intent":"trend","subjects":["x"],"time_range":{"from_year":2024,"until_year":2015}})") ==
          ErrorKind::PlanInvalid);
    CHECK(plan_error("not json at all") == ErrorKind::PlanInvalid);
    CHECK(plan_error(R"({"intent":"ranking","subjects":["x"],"top_n":99})") == ErrorKind::PlanInvalid);

    // Fenced output and defaults.
    const auto fenced = reasoner::validate_plan_json("```json\n{\"intent\":\"ranking\",\"subjects\":[\" x \"]}\n```");
    CHECK(fenced.subjects == std::vector<std::string>{"x"});
    CHECK(fenced.top_n == 10);
    CHECK(fenced.rank_dimension == RankDimension::Venue);
    CHECK(reasoner::validate_plan_json(R"({"intent":"trend","subjects":["x"]})").time_range ==
          reasoner::default_trend_range());
    const auto stats = reasoner::validate_plan_json(R"({"intent":"statistics","subjects":["x"],"top_n":5})");
    CHECK_FALSE(stats.top_n.has_value());
}

TEST_CASE("reasoner prompt: fixed system prompt, bounded user content") {
    const auto a = reasoner::build_reasoner_prompt(UserQuery::make("graphene trend"));
    const auto b = reasoner::build_reasoner_prompt(UserQuery::make("Compare CRISPR vs gene therapy"));
    CHECK(a.system_prompt == b.system_prompt);
    CHECK(a.system_prompt == reasoner::system_prompt());
    CHECK(a.user_content != b.user_content);
    CHECK(reasoner::query_from_prompt(b.user_content) == "Compare CRISPR vs gene therapy");
    CHECK_FALSE(reasoner::query_from_prompt("unrelated").has_value());

    const auto overhead = estimate_tokens(reasoner::build_reasoner_prompt(UserQuery::make("x")).user_content);
    const auto longest = reasoner::build_reasoner_prompt(UserQuery::make(std::string(1000, 'q')));
    CHECK(estimate_tokens(longest.system_prompt) + estimate_tokens(longest.user_content) <=
          estimate_tokens(reasoner::system_prompt()) + 250 + overhead);
}

TEST_CASE("parse_query with a canned plan") {
    const std::string canned = R"({"intent":"trend","subjects":["graphene"],"time_range":{"from_year":2000,"until_year":2010}})";
    llm::MockProvider mock({{"graphene", canned}}, nullptr);
    const auto q = UserQuery::make("anything about graphene");
    const auto parsed = reasoner::parse_query(q, mock);
    CHECK(parsed.plan.time_range == YearRange{2000, 2010});
    const auto prompt = reasoner::build_reasoner_prompt(q);
    CHECK(parsed.usage.input_tokens ==
          estimate_tokens(prompt.system_prompt) + estimate_tokens(prompt.user_content));
    CHECK(parsed.usage.output_tokens == estimate_tokens(canned));
    CHECK(mock.call_count() == 1);
}

TEST_CASE("parse_query retries exactly once") {
    llm::MockProvider broken({{"Query:", "sorry, no JSON"}}, nullptr);
    try {
        reasoner::parse_query(UserQuery::make("graphene"), broken);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PlanInvalid);
    }
    CHECK(broken.call_count() == 2);

    // First reply rejected, second accepted; usage covers both calls.
    llm::MockProvider recovering({{"previous response was rejected", R"({"intent":"statistics","subjects":["x"]})"},
                                  {"Query:", "{}"}},
                                 nullptr);
    const auto parsed = reasoner::parse_query(UserQuery::make("x"), recovering);
    CHECK(parsed.plan.subjects == std::vector<std::string>{"x"});
    CHECK(recovering.call_count() == 2);
    const auto first = reasoner::build_reasoner_prompt(UserQuery::make("x"));
    CHECK(parsed.usage.input_tokens >
          2 * (estimate_tokens(first.system_prompt) + estimate_tokens(first.user_content)) - 1);
}
