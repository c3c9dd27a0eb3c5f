#pragma once

#include "res/core/time.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace res {

inline constexpr std::size_t kMaxQueryChars = 1000;
inline constexpr std::size_t kMaxSubjects = 5;
inline constexpr std::size_t kMaxSubjectChars = 120;
inline constexpr std::size_t kMaxLabelChars = 80;
inline constexpr std::size_t kMaxPoints = 50;
inline constexpr std::size_t kMaxSeries = 5;
inline constexpr int kMaxTopN = 20;
inline constexpr int kMinYear = 1600;

// Upper bound on the estimated token size of a canonical summary.
inline constexpr std::uint64_t kSummaryTokenBudget = 800;

/// A natural-language question. Construct through make(), which rejects
/// empty, over-long and non-UTF-8 input.
class UserQuery {
public:
    static UserQuery make(std::string text);

    const std::string& text() const noexcept { return text_; }

private:
    explicit UserQuery(std::string text) : text_(std::move(text)) {}
    std::string text_;
};

enum class Intent { Trend, Comparison, Ranking, Statistics };
enum class RankDimension { Venue, Publisher, WorkType };

std::string_view to_string(Intent intent);
std::string_view to_string(RankDimension dimension);
std::optional<Intent> intent_from_string(std::string_view text);
std::optional<RankDimension> rank_dimension_from_string(std::string_view text);

struct YearRange {
    int from_year = 0;
    int until_year = 0;

    int span() const noexcept { return until_year - from_year + 1; }
    bool contains(int year) const noexcept { return year >= from_year && year <= until_year; }
    friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct QueryPlan {
    Intent intent = Intent::Statistics;
    std::vector<std::string> subjects;
    std::optional<YearRange> time_range;
    std::optional<int> top_n;
    std::optional<RankDimension> rank_dimension;

    friend bool operator==(const QueryPlan&, const QueryPlan&) = default;
};

// Throws res::Error(PlanInvalid) naming the first violated invariant.
void validate_plan(const QueryPlan& plan);

struct DataPoint {
    std::string label;
    std::uint64_t value = 0;

    friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

struct Series {
    std::string subject;
    std::vector<DataPoint> points;

    friend bool operator==(const Series&, const Series&) = default;
};

struct SummaryMetadata {
    std::string source_name;
    std::uint64_t dataset_size_estimate = 0;
    Timestamp retrieved_at{};
    QueryPlan plan_echo;

    friend bool operator==(const SummaryMetadata&, const SummaryMetadata&) = default;
};

/// The fixed-size aggregate handed from the Executor to the Synthesizer.
/// It carries counts and labels only; nothing identifies an individual work.
struct StatisticalSummary {
    std::vector<Series> series;
    std::map<std::string, std::uint64_t> totals;
    SummaryMetadata metadata;

    bool empty() const;
    friend bool operator==(const StatisticalSummary&, const StatisticalSummary&) = default;
};

enum class ChartType { Line, Bar, GroupedBar };
std::string_view to_string(ChartType type);
std::optional<ChartType> chart_type_from_string(std::string_view text);

struct ChartConfig {
    ChartType chart_type = ChartType::Bar;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> series_refs;

    friend bool operator==(const ChartConfig&, const ChartConfig&) = default;
};

struct Narrative {
    std::string text;
    std::optional<ChartConfig> chart;

    friend bool operator==(const Narrative&, const Narrative&) = default;
};

enum class UsageSource { Estimated, Reported };

struct TokenUsage {
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    UsageSource source = UsageSource::Estimated;

    std::uint64_t total() const noexcept { return input_tokens + output_tokens; }
    TokenUsage& operator+=(const TokenUsage& other);
    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct RunLedger {
    TokenUsage reasoner;
    TokenUsage executor;  // always zero: the Executor never calls a model
    TokenUsage synthesizer;

    friend bool operator==(const RunLedger&, const RunLedger&) = default;
};

std::uint64_t ledger_total(const RunLedger& ledger);

enum class RunStatus { Completed, Failed };
std::string_view to_string(RunStatus status);

struct RunRecord {
    std::string run_id;
    std::string query;
    std::optional<QueryPlan> plan;
    std::optional<StatisticalSummary> summary;
    std::optional<Narrative> narrative;
    RunLedger ledger;
    Timestamp started_at{};
    Timestamp finished_at{};
    RunStatus status = RunStatus::Failed;
    std::optional<std::string> failure_reason;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// UTF-8 helpers shared by validation and truncation.
bool is_valid_utf8(std::string_view text);
std::size_t utf8_length(std::string_view text);
std::string utf8_truncate(std::string_view text, std::size_t max_chars);
std::string trim(std::string_view text);
std::string to_lower_ascii(std::string_view text);

}  // namespace res
