#include "res/synthesizer/synthesizer.hpp"

#include "res/core/errors.hpp"
#include "res/core/json.hpp"

#include <algorithm>
#include <sstream>

namespace res::synthesizer {

namespace {

using u128 = unsigned __int128;

// round(num / den) to the nearest integer, halves away from zero.
u128 round_div(u128 num, u128 den) { return (2 * num + den) / (2 * den); }

// A count of tenths as "<int>.<digit>"; u128 because a percentage of a
// 64-bit count does not fit in 64 bits.
std::string tenths(u128 value) {
    std::string digits;
    for (u128 whole = value / 10; whole > 0 || digits.empty(); whole /= 10) {
        digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(whole % 10)));
    }
    return digits + "." + static_cast<char>('0' + static_cast<int>(value % 10));
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
        out += items[i];
    }
    return out;
}

std::string range_phrase(const QueryPlan& plan) {
    if (!plan.time_range) return "";
    const auto& r = *plan.time_range;
    if (r.from_year == r.until_year) return " in " + std::to_string(r.from_year);
    return " between " + std::to_string(r.from_year) + " and " + std::to_string(r.until_year);
}

std::string dimension_plural(std::optional<RankDimension> d) {
    switch (d.value_or(RankDimension::Venue)) {
        case RankDimension::Venue: return "venues";
        case RankDimension::Publisher: return "publishers";
        case RankDimension::WorkType: return "work types";
    }
    return "venues";
}

std::string bucket_list(const Series& s) {
    std::string out;
    for (const auto& p : s.points) {
        if (!out.empty()) out += "; ";
        out += p.label + " (" + std::to_string(p.value) + ")";
    }
    return out;
}

std::optional<std::uint64_t> total_of(const StatisticalSummary& s, const std::string& subject) {
    auto it = s.totals.find(subject);
    if (it == s.totals.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> subjects_of(const StatisticalSummary& s) {
    if (!s.metadata.plan_echo.subjects.empty()) return s.metadata.plan_echo.subjects;
    std::vector<std::string> out;
    for (const auto& [k, v] : s.totals) out.push_back(k);
    return out;
}

void trend_text(const StatisticalSummary& s, std::ostringstream& out) {
    const Series* first_nonempty = nullptr;
    for (const auto& series : s.series) {
        if (!series.points.empty()) {
            first_nonempty = &series;
            break;
        }
    }
    out << "Publication trend for " << join(subjects_of(s));
    if (first_nonempty != nullptr) {
        out << " from " << first_nonempty->points.front().label << " to " << first_nonempty->points.back().label;
    }
    out << ".";
    for (const auto& series : s.series) {
        const auto& pts = series.points;
        out << " " << series.subject << ": ";
        const bool all_zero = std::all_of(pts.begin(), pts.end(), [](const DataPoint& p) { return p.value == 0; });
        if (pts.empty() || all_zero) {
            out << "no matching publications in this period.";
            continue;
        }
        if (pts.size() == 1) {
            out << pts.front().value << " publications in " << pts.front().label << ".";
            continue;
        }
        const auto& a = pts.front();
        const auto& b = pts.back();
        out << a.value << " publications in " << a.label << ", " << b.value << " in " << b.label;
        if (a.value == 0) {
            out << " (growing from zero)";
        } else {
            out << " (" << format_percent_change(a.value, b.value) << ")";
        }
        const auto peak = std::max_element(pts.begin(), pts.end(), [](const DataPoint& x, const DataPoint& y) {
            return x.value < y.value;
        });
        out << ", peaking at " << peak->value << " in " << peak->label;
        if (auto t = total_of(s, series.subject)) out << "; " << *t << " in total";
        out << ".";
    }
}

void comparison_text(const StatisticalSummary& s, std::ostringstream& out) {
    const auto subjects = subjects_of(s);
    out << "Publication counts" << range_phrase(s.metadata.plan_echo) << ":";
    std::vector<std::pair<std::string, std::uint64_t>> rows;
    for (const auto& subject : subjects) {
        if (auto t = total_of(s, subject)) rows.emplace_back(subject, *t);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << (i == 0 ? " " : "; ") << rows[i].first << ": " << rows[i].second;
    }
    out << ".";
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (rows.size() >= 2 && rows[0].second > 0 && rows[1].second > 0) {
        out << " " << rows[0].first << " has " << format_ratio(rows[0].second, rows[1].second) << " the volume of "
            << rows[1].first << ".";
    }
    for (const auto& [subject, total] : rows) {
        if (total == 0) out << " No matching publications for " << subject << ".";
    }
}

void ranking_text(const StatisticalSummary& s, std::ostringstream& out) {
    const auto& plan = s.metadata.plan_echo;
    const auto subjects = subjects_of(s);
    const std::string& lead = subjects.front();
    if (s.series.empty() || s.series.front().points.empty()) {
        out << lead << ": " << total_of(s, lead).value_or(0) << " matching publications"
            << range_phrase(plan) << ", with no " << dimension_plural(plan.rank_dimension) << " to rank.";
        return;
    }
    const auto& series = s.series.front();
    out << "Leading " << dimension_plural(plan.rank_dimension) << " for " << series.subject << range_phrase(plan)
        << ": " << bucket_list(series) << ".";
    out << " " << series.points.front().label << " leads with " << series.points.front().value;
    if (auto t = total_of(s, series.subject)) out << " of " << *t << " matching publications";
    out << ".";
}

void statistics_text(const StatisticalSummary& s, std::ostringstream& out) {
    const auto& plan = s.metadata.plan_echo;
    bool first = true;
    for (const auto& subject : subjects_of(s)) {
        auto t = total_of(s, subject);
        if (!t) continue;
        out << (first ? "" : " ") << subject << ": " << *t << " matching publications" << range_phrase(plan) << ".";
        first = false;
    }
    if (!s.series.empty() && !s.series.front().points.empty()) {
        out << " By work type for " << s.series.front().subject << ": " << bucket_list(s.series.front()) << ".";
    }
}

}  // namespace

const std::string& system_prompt() {
    static const std::string prompt =
        "You are the narrative writer of a scholarly research assistant. You receive one JSON "
        "object of aggregated publication statistics: per-subject totals, optional series of "
        "labelled counts, and metadata about the data source and the query plan.\n"
        "Write a short, factual paragraph (at most 120 words) that answers the plan's question "
        "from these statistics.\n"
        "Rules: use only numbers that appear in the JSON, or percentage changes and ratios "
        "computed directly from them; never estimate, extrapolate or add outside knowledge; "
        "do not mention individual papers or authors; if all counts are zero, say that no "
        "matching results were found. Output plain prose only.";
    return prompt;
}

std::string format_percent_change(std::uint64_t first, std::uint64_t last) {
    if (first == 0) return "";
    const bool down = last < first;
    const u128 diff = down ? first - last : last - first;
    return std::string(down ? "-" : "+") + tenths(round_div(diff * 1000, first)) + "%";
}

std::string format_ratio(std::uint64_t numerator, std::uint64_t denominator) {
    if (denominator == 0) throw std::invalid_argument("ratio with zero denominator");
    return tenths(round_div(static_cast<u128>(numerator) * 10, denominator)) + "\xC3\x97";
}

std::optional<ChartConfig> build_chart_config(const StatisticalSummary& summary) {
    if (summary.empty()) return std::nullopt;
    ChartConfig c;
    c.y_label = "Publications";
    const auto& plan = summary.metadata.plan_echo;
    const auto series_subjects = [&] {
        std::vector<std::string> refs;
        for (const auto& s : summary.series) refs.push_back(s.subject);
        return refs;
    };
    const auto total_subjects = [&] {
        std::vector<std::string> refs;
        for (const auto& subject : subjects_of(summary)) {
            if (summary.totals.count(subject) > 0) refs.push_back(subject);
        }
        return refs;
    };
    switch (plan.intent) {
        case Intent::Trend:
            c.chart_type = ChartType::Line;
            c.x_label = "Year";
            c.series_refs = series_subjects();
            break;
        case Intent::Comparison:
            if (!summary.series.empty()) {
                c.chart_type = ChartType::GroupedBar;
                c.x_label = "Year";
                c.series_refs = series_subjects();
            } else {
                c.chart_type = ChartType::Bar;
                c.x_label = "Subject";
                c.series_refs = total_subjects();
            }
            break;
        case Intent::Ranking:
            if (summary.series.empty()) return std::nullopt;
            c.chart_type = ChartType::Bar;
            c.x_label = plan.rank_dimension == RankDimension::Publisher  ? "Publisher"
                        : plan.rank_dimension == RankDimension::WorkType ? "Work type"
                                                                         : "Venue";
            c.series_refs = series_subjects();
            break;
        case Intent::Statistics:
            c.chart_type = ChartType::Bar;
            c.x_label = "Subject";
            c.series_refs = total_subjects();
            break;
    }
    if (c.series_refs.empty()) return std::nullopt;
    return c;
}

Narrative template_narrative(const StatisticalSummary& summary) {
    std::ostringstream out;
    const auto& plan = summary.metadata.plan_echo;
    if (summary.empty()) {
        out << "No matching results were found for " << join(subjects_of(summary)) << range_phrase(plan) << " in the "
            << summary.metadata.source_name << " corpus.";
        return {out.str(), std::nullopt};
    }
    switch (plan.intent) {
        case Intent::Trend: trend_text(summary, out); break;
        case Intent::Comparison: comparison_text(summary, out); break;
        case Intent::Ranking: ranking_text(summary, out); break;
        case Intent::Statistics: statistics_text(summary, out); break;
    }
    out << " Source: " << summary.metadata.source_name << ", indexing " << summary.metadata.dataset_size_estimate
        << " works.";
    return {out.str(), build_chart_config(summary)};
}

llm::PromptSpec build_synthesizer_prompt(const StatisticalSummary& summary) {
    return {system_prompt(), serialize_canonical(summary)};
}

Synthesis synthesize(const StatisticalSummary& summary, llm::LlmProvider& provider) {
    auto response = provider.complete(build_synthesizer_prompt(summary));
    auto text = trim(response.text);
    if (text.empty()) fail(ErrorKind::ProviderError, "synthesizer received an empty completion");
    return {Narrative{std::move(text), build_chart_config(summary)}, response.usage};
}

}  // namespace res::synthesizer
