#include "res/executor/executor.hpp"

#include "res/core/json.hpp"
#include "res/core/tokens.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace res::executor {

namespace {

using datasources::DataSource;

Series yearly_series(const DataSource& source, const std::string& subject, const YearRange& range) {
    const int from = std::max(range.from_year, range.until_year - static_cast<int>(kMaxPoints) + 1);
    Series s{subject, {}};
    for (const auto& yc : source.yearly_counts(subject, from, range.until_year)) {
        s.points.push_back({std::to_string(yc.year), yc.count});
    }
    return s;
}

std::optional<Series> bucket_series(const DataSource& source, const std::string& subject, RankDimension dimension,
                                    int limit, const std::optional<YearRange>& range) {
    auto buckets = source.facet_counts(subject, dimension, limit, range);
    if (buckets.empty()) return std::nullopt;
    Series s{subject, {}};
    for (auto& b : buckets) s.points.push_back({std::move(b.label), b.count});
    return s;
}

bool is_time_series(Intent intent) { return intent == Intent::Trend || intent == Intent::Comparison; }

void sort_bucket_points(std::vector<DataPoint>& points) {
    std::stable_sort(points.begin(), points.end(), [](const DataPoint& a, const DataPoint& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.label < b.label;
    });
}

std::uint64_t summary_tokens(const StatisticalSummary& s) { return estimate_tokens(serialize_canonical(s)); }

}  // namespace

StatisticalSummary execute(const QueryPlan& plan, const DataSource& source) {
    StatisticalSummary out;
    out.metadata.source_name = source.source_name();
    out.metadata.dataset_size_estimate = source.dataset_size_estimate();
    out.metadata.retrieved_at = source.snapshot_time();
    out.metadata.plan_echo = plan;

    switch (plan.intent) {
        case Intent::Trend: {
            const auto& range = *plan.time_range;
            for (const auto& subject : plan.subjects) {
                auto series = yearly_series(source, subject, range);
                if (range.span() <= static_cast<int>(kMaxPoints)) {
                    out.totals[subject] = std::accumulate(series.points.begin(), series.points.end(), std::uint64_t{0},
                                                          [](std::uint64_t acc, const DataPoint& p) { return acc + p.value; });
                } else {
                    out.totals[subject] = source.count_total(subject, range);
                }
                out.series.push_back(std::move(series));
            }
            break;
        }
        case Intent::Comparison:
            for (const auto& subject : plan.subjects) {
                out.totals[subject] = source.count_total(subject, plan.time_range);
                if (plan.time_range) out.series.push_back(yearly_series(source, subject, *plan.time_range));
            }
            break;
        case Intent::Ranking:
            for (const auto& subject : plan.subjects) out.totals[subject] = source.count_total(subject, plan.time_range);
            if (auto s = bucket_series(source, plan.subjects.front(), *plan.rank_dimension, *plan.top_n, plan.time_range)) {
                out.series.push_back(std::move(*s));
            }
            break;
        case Intent::Statistics:
            for (const auto& subject : plan.subjects) out.totals[subject] = source.count_total(subject, plan.time_range);
            if (auto s = bucket_series(source, plan.subjects.front(), RankDimension::WorkType, 10, plan.time_range)) {
                out.series.push_back(std::move(*s));
            }
            break;
    }
    return enforce_size_contract(std::move(out));
}

StatisticalSummary enforce_size_contract(StatisticalSummary summary) {
    const Intent intent = summary.metadata.plan_echo.intent;
    const bool time_series = is_time_series(intent);

    if (summary.series.size() > kMaxSeries) summary.series.resize(kMaxSeries);

    if (summary.totals.size() > kMaxSubjects) {
        std::set<std::string> keep;
        for (const auto& s : summary.series) keep.insert(s.subject);
        for (const auto& [subject, count] : summary.totals) {
            if (keep.size() >= kMaxSubjects) break;
            keep.insert(subject);
        }
        std::erase_if(summary.totals, [&](const auto& kv) { return keep.count(kv.first) == 0; });
    }

    std::size_t bucket_cap = kMaxPoints;
    if (intent == Intent::Ranking) {
        const int top_n = summary.metadata.plan_echo.top_n.value_or(kMaxTopN);
        bucket_cap = static_cast<std::size_t>(std::clamp(top_n, 1, kMaxTopN));
    }

    for (auto& series : summary.series) {
        for (auto& p : series.points) {
            if (utf8_length(p.label) > kMaxLabelChars) p.label = utf8_truncate(p.label, kMaxLabelChars);
        }
        auto& pts = series.points;
        if (time_series) {
            if (pts.size() > kMaxPoints) pts.erase(pts.begin(), pts.end() - static_cast<std::ptrdiff_t>(kMaxPoints));
        } else {
            sort_bucket_points(pts);
            if (pts.size() > bucket_cap) pts.resize(bucket_cap);
        }
    }

    while (summary_tokens(summary) > kSummaryTokenBudget) {
        // Last of the longest series.
        auto longest = summary.series.end();
        for (auto it = summary.series.begin(); it != summary.series.end(); ++it) {
            if (longest == summary.series.end() || it->points.size() >= longest->points.size()) longest = it;
        }
        if (longest != summary.series.end() && !longest->points.empty()) {
            if (time_series) {
                longest->points.erase(longest->points.begin());
            } else {
                longest->points.pop_back();
            }
            continue;
        }
        auto empty = std::find_if(summary.series.rbegin(), summary.series.rend(),
                                  [](const Series& s) { return s.points.empty(); });
        if (empty == summary.series.rend()) break;
        summary.series.erase(std::next(empty).base());
    }
    return summary;
}

}  // namespace res::executor
