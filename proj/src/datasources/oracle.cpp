#include "res/datasources/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace res::datasources {

namespace {

// Record keywords as text, compared against subject words as text.
bool record_matches(const SyntheticRecord& record, const std::set<std::string>& subject_words) {
    for (auto id : record.keywords()) {
        if (subject_words.count(std::string(vocab::keywords()[id])) > 0) return true;
    }
    return false;
}

std::set<std::string> words_of(const std::string& subject) {
    const auto tokens = subject_tokens(subject);
    return {tokens.begin(), tokens.end()};
}

bool in_range(const SyntheticRecord& r, const std::optional<YearRange>& range) {
    return !range || (r.year >= range->from_year && r.year <= range->until_year);
}

std::uint64_t scan_count(std::span<const SyntheticRecord> records, const std::string& subject,
                         const std::optional<YearRange>& range) {
    const auto words = words_of(subject);
    std::uint64_t n = 0;
    for (const auto& r : records) {
        if (in_range(r, range) && record_matches(r, words)) ++n;
    }
    return n;
}

Series scan_years(std::span<const SyntheticRecord> records, const std::string& subject, const YearRange& range) {
    const auto words = words_of(subject);
    std::map<int, std::uint64_t> per_year;
    for (int y = range.from_year; y <= range.until_year; ++y) per_year[y] = 0;
    for (const auto& r : records) {
        if (in_range(r, range) && record_matches(r, words)) ++per_year[r.year];
    }
    Series s{subject, {}};
    for (const auto& [year, count] : per_year) s.points.push_back({std::to_string(year), count});
    return s;
}

std::string label_of(const SyntheticRecord& r, RankDimension dim) {
    switch (dim) {
        case RankDimension::Venue: return std::string(vocab::venues()[r.venue]);
        case RankDimension::Publisher: return std::string(vocab::publishers()[r.publisher]);
        case RankDimension::WorkType: return std::string(vocab::work_types()[r.work_type]);
    }
    return {};
}

std::optional<Series> scan_group_by(std::span<const SyntheticRecord> records, const std::string& subject,
                                    RankDimension dim, std::size_t limit, const std::optional<YearRange>& range) {
    const auto words = words_of(subject);
    std::map<std::string, std::uint64_t> groups;
    for (const auto& r : records) {
        if (in_range(r, range) && record_matches(r, words)) ++groups[label_of(r, dim)];
    }
    if (groups.empty()) return std::nullopt;
    std::vector<std::pair<std::string, std::uint64_t>> rows(groups.begin(), groups.end());
    // groups is label-ordered already; a stable sort on count keeps ties by label.
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    Series s{subject, {}};
    for (std::size_t i = 0; i < rows.size() && i < limit; ++i) s.points.push_back({rows[i].first, rows[i].second});
    return s;
}

}  // namespace

StatisticalSummary brute_force_aggregate(std::span<const SyntheticRecord> records, const QueryPlan& plan) {
    StatisticalSummary out;
    out.metadata.source_name = "synthetic";
    out.metadata.dataset_size_estimate = records.size();
    out.metadata.retrieved_at = kSyntheticSnapshot;
    out.metadata.plan_echo = plan;

    for (const auto& subject : plan.subjects) out.totals[subject] = scan_count(records, subject, plan.time_range);

    switch (plan.intent) {
        case Intent::Trend:
            for (const auto& subject : plan.subjects) out.series.push_back(scan_years(records, subject, *plan.time_range));
            break;
        case Intent::Comparison:
            if (plan.time_range) {
                for (const auto& subject : plan.subjects) {
                    out.series.push_back(scan_years(records, subject, *plan.time_range));
                }
            }
            break;
        case Intent::Ranking:
            if (auto s = scan_group_by(records, plan.subjects.front(), *plan.rank_dimension,
                                       static_cast<std::size_t>(*plan.top_n), plan.time_range)) {
                out.series.push_back(std::move(*s));
            }
            break;
        case Intent::Statistics:
            if (auto s = scan_group_by(records, plan.subjects.front(), RankDimension::WorkType, 10, plan.time_range)) {
                out.series.push_back(std::move(*s));
            }
            break;
    }
    return out;
}

}  // namespace res::datasources
