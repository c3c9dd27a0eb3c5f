#include "res/core/types.hpp"

#include "res/core/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace res {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::PlanInvalid: return "plan_invalid";
        case ErrorKind::SourceError: return "source_error";
        case ErrorKind::ProviderError: return "provider_error";
    }
    return "unknown";
}

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        if (c < 0x80) {
            extra = 0;
        } else if ((c >> 5) == 0x6 && c >= 0xC2) {
            extra = 1;
        } else if ((c >> 4) == 0xE) {
            extra = 2;
        } else if ((c >> 3) == 0x1E && c <= 0xF4) {
            extra = 3;
        } else {
            return false;
        }
        if (i + extra >= text.size() && extra > 0) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) >> 6) != 0x2) return false;
        }
        i += extra + 1;
    }
    return true;
}

std::size_t utf8_length(std::string_view text) {
    return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char ch) {
        return (static_cast<unsigned char>(ch) & 0xC0) != 0x80;
    }));
}

std::string utf8_truncate(std::string_view text, std::size_t max_chars) {
    std::size_t chars = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            if (chars == max_chars) return std::string(text.substr(0, i));
            ++chars;
        }
    }
    return std::string(text);
}

std::string trim(std::string_view text) {
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    std::size_t b = 0, e = text.size();
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    return std::string(text.substr(b, e - b));
}

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

UserQuery UserQuery::make(std::string text) {
    if (!is_valid_utf8(text)) throw std::invalid_argument("query is not valid UTF-8");
    if (trim(text).empty()) throw std::invalid_argument("query is empty");
    if (utf8_length(text) > kMaxQueryChars) {
        throw std::invalid_argument("query exceeds 1000 characters");
    }
    return UserQuery(std::move(text));
}

std::string_view to_string(Intent intent) {
    switch (intent) {
        case Intent::Trend: return "trend";
        case Intent::Comparison: return "comparison";
        case Intent::Ranking: return "ranking";
        case Intent::Statistics: return "statistics";
    }
    return "statistics";
}

std::string_view to_string(RankDimension dimension) {
    switch (dimension) {
        case RankDimension::Venue: return "venue";
        case RankDimension::Publisher: return "publisher";
        case RankDimension::WorkType: return "work_type";
    }
    return "venue";
}

std::optional<Intent> intent_from_string(std::string_view text) {
    for (auto i : {Intent::Trend, Intent::Comparison, Intent::Ranking, Intent::Statistics}) {
        if (to_string(i) == text) return i;
    }
    return std::nullopt;
}

std::optional<RankDimension> rank_dimension_from_string(std::string_view text) {
    for (auto d : {RankDimension::Venue, RankDimension::Publisher, RankDimension::WorkType}) {
        if (to_string(d) == text) return d;
    }
    return std::nullopt;
}

std::string_view to_string(ChartType type) {
    switch (type) {
        case ChartType::Line: return "line";
        case ChartType::Bar: return "bar";
        case ChartType::GroupedBar: return "grouped_bar";
    }
    return "bar";
}

std::optional<ChartType> chart_type_from_string(std::string_view text) {
    for (auto t : {ChartType::Line, ChartType::Bar, ChartType::GroupedBar}) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

std::string_view to_string(RunStatus status) {
    return status == RunStatus::Completed ? "completed" : "failed";
}

void validate_plan(const QueryPlan& plan) {
    const auto invalid = [](const std::string& why) { fail(ErrorKind::PlanInvalid, why); };

    if (plan.subjects.empty()) invalid("plan has no subjects");
    if (plan.subjects.size() > kMaxSubjects) invalid("plan has more than 5 subjects");
    std::set<std::string> seen;
    for (const auto& s : plan.subjects) {
        if (s.empty() || s != trim(s)) invalid("subject is empty or not trimmed");
        if (!is_valid_utf8(s)) invalid("subject is not valid UTF-8");
        if (std::any_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x20; })) {
            invalid("subject contains control characters");
        }
        if (utf8_length(s) > kMaxSubjectChars) invalid("subject exceeds 120 characters");
        if (!seen.insert(to_lower_ascii(s)).second) invalid("duplicate subject: " + s);
    }
    if (plan.time_range) {
        const auto& r = *plan.time_range;
        if (r.from_year < kMinYear) invalid("from_year before 1600");
        if (r.from_year > r.until_year) invalid("from_year is after until_year");
        if (r.until_year > current_utc_year() + 1) invalid("until_year is in the future");
    }
    switch (plan.intent) {
        case Intent::Trend:
            if (!plan.time_range) invalid("trend plan without time_range");
            break;
        case Intent::Comparison:
            if (plan.subjects.size() < 2) invalid("comparison needs at least two subjects");
            break;
        case Intent::Ranking:
            if (!plan.top_n || !plan.rank_dimension) invalid("ranking plan without top_n/rank_dimension");
            break;
        case Intent::Statistics:
            break;
    }
    if (plan.top_n && (*plan.top_n < 1 || *plan.top_n > kMaxTopN)) invalid("top_n outside 1..20");
}

bool StatisticalSummary::empty() const {
    if (!series.empty()) return false;
    return std::all_of(totals.begin(), totals.end(), [](const auto& kv) { return kv.second == 0; });
}

TokenUsage& TokenUsage::operator+=(const TokenUsage& other) {
    input_tokens += other.input_tokens;
    output_tokens += other.output_tokens;
    if (other.source == UsageSource::Reported) source = UsageSource::Reported;
    return *this;
}

std::uint64_t ledger_total(const RunLedger& ledger) {
    return ledger.reasoner.total() + ledger.executor.total() + ledger.synthesizer.total();
}

}  // namespace res
