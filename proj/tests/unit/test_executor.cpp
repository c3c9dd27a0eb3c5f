#include "res/core/json.hpp"
#include "res/core/tokens.hpp"
#include "res/datasources/oracle.hpp"
#include "res/datasources/synthetic.hpp"
#include "res/executor/executor.hpp"

#include "../support/generators.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace res;
using datasources::SyntheticSource;

namespace {

std::uint64_t tokens_of(const StatisticalSummary& s) { return estimate_tokens(serialize_canonical(s)); }

QueryPlan trend(std::vector<std::string> subjects, int from, int until) {
    QueryPlan p;
    p.intent = Intent::Trend;
    p.subjects = std::move(subjects);
    p.time_range = YearRange{from, until};
    return p;
}

// Non-comment lines of every source file under dir that include a header
// from the forbidden module.
std::vector<std::string> forbidden_includes(const std::filesystem::path& dir, const std::string& module) {
    std::vector<std::string> hits;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path());
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("#include", 0) == 0 && line.find("res/" + module + "/") != std::string::npos) {
                hits.push_back(entry.path().string() + ": " + line);
            }
        }
    }
    return hits;
}

}  // namespace

TEST_CASE("executor matches the brute-force oracle on random plans") {
    std::mt19937_64 rng(2024);
    const SyntheticSource src(42, 20'000);
    for (int i = 0; i < 150; ++i) {
        const auto plan = testing::random_plan(rng);
        const auto got = executor::execute(plan, src);
        const auto expected = executor::enforce_size_contract(datasources::brute_force_aggregate(src.records(), plan));
        CHECK_MESSAGE(got == expected, serialize_plan(plan));
    }
}

TEST_CASE("executor over an empty source matches the oracle") {
    const SyntheticSource empty(std::vector<datasources::SyntheticRecord>{});
    std::mt19937_64 rng(9);
    for (int i = 0; i < 40; ++i) {
        const auto plan = testing::random_plan(rng);
        const auto got = executor::execute(plan, empty);
        CHECK(got == executor::enforce_size_contract(datasources::brute_force_aggregate(empty.records(), plan)));
        for (const auto& [subject, total] : got.totals) CHECK(total == 0);
        CHECK(got.metadata.dataset_size_estimate == 0);
    }
}

TEST_CASE("executor: worked trend example") {
    const SyntheticSource src(42, 10'000);
    const auto s = executor::execute(trend({"quantum computing"}, 2015, 2024), src);
    REQUIRE(s.series.size() == 1);
    CHECK(s.series[0].points.size() == 10);
    CHECK(s.series[0].points.front().label == "2015");
    CHECK(s.series[0].points.back().label == "2024");
    std::uint64_t sum = 0;
    for (const auto& p : s.series[0].points) sum += p.value;
    CHECK(s.totals.at("quantum computing") == sum);
    CHECK(s.metadata.source_name == "synthetic");
    CHECK(s.metadata.dataset_size_estimate == 10'000);
    CHECK(s.metadata.retrieved_at == datasources::kSyntheticSnapshot);
    CHECK(tokens_of(s) <= kSummaryTokenBudget);
}

TEST_CASE("executor: long trends keep the latest 50 years") {
    const SyntheticSource src(1, 2'000);
    const auto s = executor::execute(trend({"graphene"}, 1950, current_utc_year()), src);
    REQUIRE(s.series.size() == 1);
    CHECK(s.series[0].points.size() == kMaxPoints);
    CHECK(s.series[0].points.back().label == std::to_string(current_utc_year()));
    CHECK(s.totals.at("graphene") == src.count_total("graphene", YearRange{1950, current_utc_year()}));
}

TEST_CASE("executor: summary size is independent of corpus size") {
    const auto plan = trend({"machine learning", "robotics"}, 2000, 2020);
    std::set<std::size_t> shapes;
    for (std::uint64_t n : {0ULL, 100ULL, 10'000ULL, 200'000ULL}) {
        const SyntheticSource src(42, n);
        const auto s = executor::execute(plan, src);
        std::size_t points = 0;
        for (const auto& series : s.series) points += series.points.size();
        shapes.insert(points * 100 + s.series.size() * 10 + s.totals.size());
        CHECK(tokens_of(s) <= kSummaryTokenBudget);
    }
    CHECK(shapes.size() == 1);
}

TEST_CASE("size contract: bounded and idempotent on arbitrary summaries") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 300; ++i) {
        const auto raw = testing::random_summary(rng);
        const auto once = executor::enforce_size_contract(raw);
        CHECK(tokens_of(once) <= kSummaryTokenBudget);
        CHECK(once.series.size() <= kMaxSeries);
        CHECK(once.totals.size() <= kMaxSeries);
        for (const auto& series : once.series) {
            CHECK(series.points.size() <= kMaxPoints);
            for (const auto& p : series.points) CHECK(utf8_length(p.label) <= kMaxLabelChars);
        }
        CHECK(executor::enforce_size_contract(once) == once);
        CHECK(once.metadata == raw.metadata);
    }
}

TEST_CASE("size contract: adversarial 500-bucket input") {
    StatisticalSummary s;
    s.metadata.source_name = "synthetic";
    s.metadata.retrieved_at = datasources::kSyntheticSnapshot;
    s.metadata.plan_echo.intent = Intent::Ranking;
    s.metadata.plan_echo.subjects = {"graphene"};
    s.metadata.plan_echo.top_n = 20;
    s.metadata.plan_echo.rank_dimension = RankDimension::Venue;
    s.totals["graphene"] = 999'999'999'999;
    Series big{"graphene", {}};
    for (int i = 0; i < 500; ++i) {
        big.points.push_back({std::string(200, static_cast<char>('a' + i % 26)) + std::to_string(i),
                              static_cast<std::uint64_t>(1'000'000'000 - i)});
    }
    s.series.push_back(big);
    const auto capped = executor::enforce_size_contract(s);
    CHECK(tokens_of(capped) <= kSummaryTokenBudget);
    REQUIRE(capped.series.size() == 1);
    CHECK(capped.series[0].points.size() <= 20);
    // Top buckets survive, in order.
    CHECK(capped.series[0].points.front().value == 1'000'000'000);
    for (std::size_t i = 1; i < capped.series[0].points.size(); ++i) {
        CHECK(capped.series[0].points[i - 1].value >= capped.series[0].points[i].value);
    }
    CHECK(executor::enforce_size_contract(capped) == capped);
}

TEST_CASE("size contract: time series drop the oldest years first") {
    StatisticalSummary s;
    s.metadata.source_name = "synthetic";
    s.metadata.plan_echo = trend({"x"}, 1900, 2000);
    Series series{"x", {}};
    for (int y = 1900; y <= 2000; ++y) series.points.push_back({std::to_string(y), 7});
    s.series.push_back(series);
    const auto capped = executor::enforce_size_contract(s);
    REQUIRE(capped.series.size() == 1);
    CHECK(capped.series[0].points.size() == kMaxPoints);
    CHECK(capped.series[0].points.back().label == "2000");
    CHECK(capped.series[0].points.front().label == "1951");
}

TEST_CASE("executor and reasoner stay on their side of the boundary") {
    const std::filesystem::path root(RES_SOURCE_DIR);
    for (const auto& dir : {root / "src/executor", root / "include/res/executor"}) {
        CHECK(forbidden_includes(dir, "llm").empty());
        CHECK(forbidden_includes(dir, "reasoner").empty());
        CHECK(forbidden_includes(dir, "synthesizer").empty());
    }
    for (const auto& dir : {root / "src/reasoner", root / "include/res/reasoner"}) {
        CHECK(forbidden_includes(dir, "datasources").empty());
        CHECK(forbidden_includes(dir, "executor").empty());
    }
    for (const auto& dir : {root / "src/synthesizer", root / "include/res/synthesizer"}) {
        CHECK(forbidden_includes(dir, "datasources").empty());
        CHECK(forbidden_includes(dir, "executor").empty());
    }
    // Negative control: the pipeline legitimately includes both.
    CHECK_FALSE(forbidden_includes(root / "src/pipeline", "reasoner").empty());
}
